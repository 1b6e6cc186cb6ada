//! Plain-text `key = value` configuration with `[section]` headers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Parses config text into `section.key -> value`.
///
/// Keys before any section header are top-level. `#` and `;` start comment
/// lines. Repeated keys are an error.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::format("config", i + 1, "unterminated section header"))?
                .trim();
            if name.is_empty() || name.contains(['[', ']', '=']) {
                return Err(Error::format("config", i + 1, "bad section name"));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::format("config", i + 1, "expected key = value"))?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(Error::format("config", i + 1, format!("bad key {key:?}")));
        }
        let full = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        if out.insert(full.clone(), value.trim().to_string()).is_some() {
            return Err(Error::format("config", i + 1, format!("duplicate key {full}")));
        }
    }
    Ok(out)
}
