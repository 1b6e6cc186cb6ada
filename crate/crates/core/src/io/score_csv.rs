//! Score CSVs shared with external scorers.
//!
//! Header `sample_id,fold,true_label,score:<class1>,...,score:<classK>`,
//! class columns in dataset order, scores with nine significant digits.

use std::collections::{HashMap, HashSet};

use super::numfmt::format_g9;
use crate::error::{Error, Result};
use crate::learning::scores::{sum_rule_fuse, ScoreMatrix};

const SOURCE: &str = "score csv";

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub id: String,
    pub fold: usize,
    pub truth: String,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub classes: Vec<String>,
    pub rows: Vec<ScoreRow>,
}

fn check_field(s: &str, what: &str) -> Result<()> {
    if s.is_empty() || s.contains([',', '"', '\n', '\r']) {
        Err(Error::InvalidInput(format!("{what} {s:?} cannot be written to a score CSV")))
    } else {
        Ok(())
    }
}

impl ScoreTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("sample_id,fold,true_label");
        for c in &self.classes {
            check_field(c, "class name")?;
            out.push_str(",score:");
            out.push_str(c);
        }
        out.push('\n');
        for r in &self.rows {
            check_field(&r.id, "sample id")?;
            check_field(&r.truth, "label")?;
            if r.scores.len() != self.classes.len() {
                return Err(Error::Mismatch(format!("row {} has {} scores", r.id, r.scores.len())));
            }
            out.push_str(&format!("{},{},{}", r.id, r.fold, r.truth));
            for s in &r.scores {
                out.push(',');
                out.push_str(&format_g9(*s));
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn folds(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self.rows.iter().map(|r| r.fold).collect();
        f.sort_unstable();
        f.dedup();
        f
    }

    /// Rows sorted by (fold, sample id).
    pub fn sorted(&self) -> ScoreTable {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| (a.fold, &a.id).cmp(&(b.fold, &b.id)));
        ScoreTable {
            classes: self.classes.clone(),
            rows,
        }
    }

    /// Fraction of rows whose argmax (lowest index on ties) is the true label.
    pub fn accuracy(&self) -> Result<f64> {
        if self.rows.is_empty() {
            return Err(Error::InvalidInput("no rows".into()));
        }
        let mut hits = 0;
        for r in &self.rows {
            let truth = self
                .classes
                .iter()
                .position(|c| *c == r.truth)
                .ok_or_else(|| Error::Mismatch(format!("label {:?} of {} is not a class column", r.truth, r.id)))?;
            let mut best = 0;
            for (j, s) in r.scores.iter().enumerate() {
                if *s > r.scores[best] {
                    best = j;
                }
            }
            hits += usize::from(best == truth);
        }
        Ok(hits as f64 / self.rows.len() as f64)
    }
}

/// Builds a table from per-fold matrices; `truth` maps a sample id to its label.
pub fn score_csv_from_folds(folds: &[ScoreMatrix], truth: impl Fn(&str) -> Option<String>) -> Result<ScoreTable> {
    let classes = folds
        .first()
        .map(|m| m.classes().to_vec())
        .ok_or_else(|| Error::InvalidInput("no folds".into()))?;
    let mut rows = Vec::new();
    for (fold, m) in folds.iter().enumerate() {
        if m.classes() != classes.as_slice() {
            return Err(Error::Mismatch(format!("fold {fold} has different classes")));
        }
        for (i, id) in m.ids().iter().enumerate() {
            rows.push(ScoreRow {
                id: id.clone(),
                fold,
                truth: truth(id).ok_or_else(|| Error::Mismatch(format!("no label for {id}")))?,
                scores: m.row(i).to_vec(),
            });
        }
    }
    Ok(ScoreTable { classes, rows })
}

pub fn parse_score_csv(text: &str) -> Result<ScoreTable> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .map(|(_, h)| h.trim_end_matches('\r'))
        .ok_or_else(|| Error::format(SOURCE, 1, "empty file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 5 || cols[..3] != ["sample_id", "fold", "true_label"] {
        return Err(Error::format(
            SOURCE,
            1,
            "header must be sample_id,fold,true_label,score:<class>,... with at least 2 classes",
        ));
    }
    let mut classes = Vec::new();
    for (j, c) in cols[3..].iter().enumerate() {
        match c.strip_prefix("score:") {
            Some(name) if !name.is_empty() => classes.push(name.to_string()),
            _ => return Err(Error::format(SOURCE, 1, format!("column {} ({c:?}) is not score:<class>", j + 4))),
        }
    }
    if classes.iter().collect::<HashSet<_>>().len() != classes.len() {
        return Err(Error::format(SOURCE, 1, "duplicate class column"));
    }
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != cols.len() {
            return Err(Error::format(SOURCE, i + 1, format!("expected {} fields, found {}", cols.len(), f.len())));
        }
        if f[0].is_empty() || !seen.insert(f[0].to_string()) {
            return Err(Error::format(SOURCE, i + 1, format!("empty or duplicate sample id {:?}", f[0])));
        }
        let fold = f[1]
            .parse()
            .map_err(|_| Error::format(SOURCE, i + 1, format!("bad fold {:?}", f[1])))?;
        if !classes.iter().any(|c| c == f[2]) {
            return Err(Error::format(SOURCE, i + 1, format!("true_label {:?} is not a class column", f[2])));
        }
        let scores = f[3..]
            .iter()
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(Error::format(SOURCE, i + 1, format!("bad score {v:?}"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(ScoreRow {
            id: f[0].to_string(),
            fold,
            truth: f[2].to_string(),
            scores,
        });
    }
    if rows.is_empty() {
        return Err(Error::format(SOURCE, 2, "no rows"));
    }
    Ok(ScoreTable { classes, rows })
}

/// Sum-rule fusion of score tables.
///
/// Rows are matched by sample id, then ordered by (fold, id). Within each
/// fold every table is z-scored over all its entries and the normalized
/// tables are summed. Returns the fused table and its accuracy.
pub fn fuse_tables(tables: &[&ScoreTable]) -> Result<(ScoreTable, f64)> {
    let first = tables.first().ok_or_else(|| Error::InvalidInput("nothing to fuse".into()))?;
    let reference = first.sorted();
    let classes = reference.classes.clone();
    for (t, table) in tables.iter().enumerate().skip(1) {
        if let Some(j) = (0..classes.len().max(table.classes.len())).find(|&j| classes.get(j) != table.classes.get(j)) {
            return Err(Error::Mismatch(format!(
                "input {}: class column {} is {:?}, expected {:?}",
                t + 1,
                j + 4,
                table.classes.get(j),
                classes.get(j)
            )));
        }
        if table.rows.len() != reference.rows.len() {
            let known: HashSet<&str> = reference.rows.iter().map(|r| r.id.as_str()).collect();
            if let Some(extra) = table.rows.iter().find(|r| !known.contains(r.id.as_str())) {
                return Err(Error::Mismatch(format!("input {}: sample {} not in input 1", t + 1, extra.id)));
            }
        }
    }
    let lookups: Vec<HashMap<&str, &ScoreRow>> = tables
        .iter()
        .map(|t| t.rows.iter().map(|r| (r.id.as_str(), r)).collect())
        .collect();
    for (t, map) in lookups.iter().enumerate().skip(1) {
        for r in &reference.rows {
            let other = map
                .get(r.id.as_str())
                .ok_or_else(|| Error::Mismatch(format!("input {}: sample {} missing", t + 1, r.id)))?;
            if other.fold != r.fold || other.truth != r.truth {
                return Err(Error::Mismatch(format!(
                    "input {}: sample {} has fold/label {}/{}, input 1 has {}/{}",
                    t + 1,
                    r.id,
                    other.fold,
                    other.truth,
                    r.fold,
                    r.truth
                )));
            }
        }
    }
    let mut fused_rows = Vec::with_capacity(reference.rows.len());
    for fold in reference.folds() {
        let rows: Vec<&ScoreRow> = reference.rows.iter().filter(|r| r.fold == fold).collect();
        let ids: Vec<String> = rows.iter().map(|r| r.id.clone()).collect();
        let matrices = lookups
            .iter()
            .map(|map| {
                let values = ids.iter().flat_map(|id| map[id.as_str()].scores.iter().copied()).collect();
                ScoreMatrix::new(ids.clone(), classes.clone(), values)
            })
            .collect::<Result<Vec<_>>>()?;
        let fused = sum_rule_fuse(&matrices.iter().collect::<Vec<_>>())?;
        for (i, r) in rows.iter().enumerate() {
            fused_rows.push(ScoreRow {
                id: r.id.clone(),
                fold,
                truth: r.truth.clone(),
                scores: fused.row(i).to_vec(),
            });
        }
    }
    let table = ScoreTable {
        classes,
        rows: fused_rows,
    };
    let acc = table.accuracy()?;
    Ok((table, acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&str, usize, &str, [f64; 2])]) -> ScoreTable {
        ScoreTable {
            classes: vec!["a".into(), "b".into()],
            rows: rows
                .iter()
                .map(|(id, f, t, s)| ScoreRow {
                    id: id.to_string(),
                    fold: *f,
                    truth: t.to_string(),
                    scores: s.to_vec(),
                })
                .collect(),
        }
    }

    #[test]
    fn csv_round_trip() {
        let t = table(&[("x", 0, "a", [0.5, -1.0 / 3.0]), ("y", 1, "b", [1e-7, 2.0])]);
        let text = t.to_csv().unwrap();
        assert!(text.starts_with("sample_id,fold,true_label,score:a,score:b\n"));
        assert!(text.contains("x,0,a,0.5,-0.333333333\n"));
        let back = parse_score_csv(&text).unwrap();
        assert_eq!(back.rows[1], t.rows[1]);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_score_csv("").is_err());
        assert!(parse_score_csv("sample_id,fold,true_label,score:a\nx,0,a,1\n").is_err());
        assert!(parse_score_csv("sample_id,fold,label,score:a,score:b\nx,0,a,1,2\n").is_err());
        assert!(parse_score_csv("sample_id,fold,true_label,score:a,score:b\nx,0,c,1,2\n").is_err());
        assert!(parse_score_csv("sample_id,fold,true_label,score:a,score:b\nx,0,a,1\n").is_err());
        assert!(parse_score_csv("sample_id,fold,true_label,score:a,score:b\nx,0,a,1,2\nx,0,a,1,2\n").is_err());
        assert!(parse_score_csv("sample_id,fold,true_label,score:a,score:b\nx,0,a,1,inf\n").is_err());
    }

    #[test]
    fn single_input_keeps_argmax() {
        let t = table(&[("x", 0, "a", [3.0, 1.0]), ("y", 0, "b", [0.0, 2.0]), ("z", 0, "b", [5.0, 4.0])]);
        let (f, acc) = fuse_tables(&[&t]).unwrap();
        assert!((acc - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(acc, t.accuracy().unwrap());
        assert_eq!(f.rows.len(), 3);
    }

    #[test]
    fn shuffled_rows_match() {
        let a = table(&[("x", 0, "a", [3.0, 1.0]), ("y", 0, "b", [0.0, 2.0]), ("z", 1, "b", [1.0, 4.0]), ("w", 1, "a", [2.0, 1.0])]);
        let mut b = a.clone();
        b.rows.reverse();
        let (f1, _) = fuse_tables(&[&a, &b]).unwrap();
        let (f2, _) = fuse_tables(&[&b, &a]).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn mismatches_named() {
        let a = table(&[("x", 0, "a", [3.0, 1.0]), ("y", 0, "b", [0.0, 2.0])]);
        let b = table(&[("x", 0, "a", [3.0, 1.0]), ("q", 0, "b", [0.0, 2.0])]);
        let err = fuse_tables(&[&a, &b]).unwrap_err().to_string();
        assert!(err.contains("y") || err.contains("q"), "{err}");
        let mut c = a.clone();
        c.classes[1] = "c".into();
        let err = fuse_tables(&[&a, &c]).unwrap_err().to_string();
        assert!(err.contains("column 5"), "{err}");
        let d = table(&[("x", 1, "a", [3.0, 1.0]), ("y", 0, "b", [0.0, 2.0])]);
        assert!(fuse_tables(&[&a, &d]).is_err());
    }
}
