//! Feature files: one per ensemble member.
//!
//! ```text
//! # bioens-features v1
//! # descriptor: ltp
//! # member: ltp@R
//! # config: P=8;R=1;tau=2
//! # fingerprint: 3f9c...
//! # dim: 512
//! <sample id>\t<label>\t<v0>,<v1>,...
//! ```
//!
//! Values use the shortest representation that parses back exactly.

use crate::error::{Error, Result};

pub const MAGIC: &str = "# bioens-features v1";
const SOURCE: &str = "feature file";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub id: String,
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFile {
    pub descriptor: String,
    pub member: String,
    pub config: String,
    pub fingerprint: String,
    pub dim: usize,
    pub rows: Vec<FeatureRow>,
}

impl FeatureFile {
    pub fn to_text(&self) -> Result<String> {
        let mut out = format!(
            "{MAGIC}\n# descriptor: {}\n# member: {}\n# config: {}\n# fingerprint: {}\n# dim: {}\n",
            self.descriptor, self.member, self.config, self.fingerprint, self.dim
        );
        for r in &self.rows {
            if r.values.len() != self.dim {
                return Err(Error::Mismatch(format!(
                    "row {} has {} values, header says {}",
                    r.id,
                    r.values.len(),
                    self.dim
                )));
            }
            if r.id.contains(['\t', '\n']) || r.label.contains(['\t', '\n']) {
                return Err(Error::InvalidInput(format!("sample id or label of {:?} contains a tab or newline", r.id)));
            }
            let vals: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{}\t{}\t{}\n", r.id, r.label, vals.join(",")));
        }
        Ok(out)
    }

    /// File name for a member: `/` becomes `-`.
    pub fn file_name(member: &str) -> String {
        format!("{}.features.tsv", member.replace('/', "-"))
    }
}

/// Header fields of a feature file: (descriptor, member, config, fingerprint, dim).
fn parse_header(lines: &[&str]) -> Result<(String, String, String, String, usize)> {
    if lines.first().map(|l| l.trim_end_matches('\r')) != Some(MAGIC) {
        return Err(Error::format(SOURCE, 1, "missing feature-file header"));
    }
    let mut fields = Vec::new();
    for (i, name) in ["descriptor", "member", "config", "fingerprint", "dim"].iter().enumerate() {
        let line = lines
            .get(i + 1)
            .map(|l| l.trim_end_matches('\r'))
            .ok_or_else(|| Error::format(SOURCE, i + 2, format!("missing {name} line")))?;
        let value = line
            .strip_prefix("# ")
            .and_then(|l| l.strip_prefix(name))
            .and_then(|l| l.strip_prefix(':'))
            .ok_or_else(|| Error::format(SOURCE, i + 2, format!("expected '# {name}: ...'")))?;
        fields.push(value.trim().to_string());
    }
    let dim = fields[4]
        .parse()
        .map_err(|_| Error::format(SOURCE, 6, format!("bad dim {:?}", fields[4])))?;
    let mut it = fields.into_iter();
    let mut next = || it.next().expect("five fields");
    Ok((next(), next(), next(), next(), dim))
}

/// Reads only the header, for resumability checks.
pub fn parse_feature_header(text: &str) -> Result<FeatureFile> {
    let lines: Vec<&str> = text.lines().take(6).collect();
    let (descriptor, member, config, fingerprint, dim) = parse_header(&lines)?;
    Ok(FeatureFile {
        descriptor,
        member,
        config,
        fingerprint,
        dim,
        rows: Vec::new(),
    })
}

pub fn parse_feature_file(text: &str) -> Result<FeatureFile> {
    let lines: Vec<&str> = text.lines().collect();
    let (descriptor, member, config, fingerprint, dim) = parse_header(&lines)?;
    let mut rows = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(6) {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(id), Some(label), Some(vals), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(Error::format(SOURCE, i + 1, "expected id<TAB>label<TAB>values"));
        };
        if id.is_empty() || label.is_empty() {
            return Err(Error::format(SOURCE, i + 1, "empty id or label"));
        }
        let values = if vals.is_empty() {
            Vec::new()
        } else {
            vals.split(',')
                .map(|v| match v.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(Error::format(SOURCE, i + 1, format!("bad value {v:?}"))),
                })
                .collect::<Result<Vec<f64>>>()?
        };
        if values.len() != dim {
            return Err(Error::format(
                SOURCE,
                i + 1,
                format!("{} values, header says {dim}", values.len()),
            ));
        }
        rows.push(FeatureRow {
            id: id.to_string(),
            label: label.to_string(),
            values,
        });
    }
    Ok(FeatureFile {
        descriptor,
        member,
        config,
        fingerprint,
        dim,
        rows,
    })
}
