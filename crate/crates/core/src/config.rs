//! Flat `key = value` configuration files with optional `[section]` headers.
//!
//! ```text
//! # comment
//! [params]
//! lambda_B = 10 lambda0
//! W_dB = -147
//! ```

use crate::error::{Error, Result};
use crate::model::LAMBDA_0;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(String, String, usize)>,
}

impl KeyValues {
    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>, line: usize) {
        self.entries.push((key.into(), value.into(), line));
    }

    /// Yields `(key, value, line)`; later duplicates override earlier ones
    /// when applied in order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, usize)> {
        self.entries
            .iter()
            .map(|(k, v, l)| (k.as_str(), v.as_str(), *l))
    }

    pub fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    sections: Vec<(String, KeyValues)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<(String, KeyValues)> = vec![(String::new(), KeyValues::default())];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Config {
                    line,
                    reason: format!("unterminated section header `{content}`"),
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::Config {
                        line,
                        reason: "empty section name".into(),
                    });
                }
                sections.push((name.to_string(), KeyValues::default()));
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                reason: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config {
                    line,
                    reason: "empty key".into(),
                });
            }
            sections
                .last_mut()
                .expect("root section always present")
                .1
                .insert(key, value.trim(), line);
        }
        Ok(ConfigFile { sections })
    }

    /// Entries of the named section (all occurrences merged). The unnamed
    /// root section is `""`.
    pub fn section(&self, name: &str) -> KeyValues {
        let mut out = KeyValues::default();
        for (sec, kv) in &self.sections {
            if sec == name {
                for (k, v, l) in kv.iter() {
                    out.insert(k, v, l);
                }
            }
        }
        out
    }

    pub fn section_names(&self) -> impl Iterator<Item = &str> {
        self.sections.iter().map(|(n, _)| n.as_str())
    }
}

/// Parses a scalar: a plain float, or a float followed by `lambda0`
/// (`10 lambda0`, `10*lambda0`) meaning a multiple of the reference density.
pub fn parse_quantity(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let (num, scale) = match t.strip_suffix("lambda0") {
        Some(head) => (head.trim().trim_end_matches('*').trim(), LAMBDA_0),
        None => (t, 1.0),
    };
    let num = if num.is_empty() && scale != 1.0 { "1" } else { num };
    num.parse::<f64>()
        .map(|v| v * scale)
        .map_err(|_| format!("cannot parse `{text}` as a number"))
}

/// Parses a comma-separated list of quantities, or a range `start:step:stop`
/// (inclusive, tolerant to rounding at the end point).
pub fn parse_grid(text: &str) -> std::result::Result<Vec<f64>, String> {
    let t = text.trim();
    if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range `{t}` must be start:step:stop"));
        }
        let start = parse_quantity(parts[0])?;
        let step = parse_quantity(parts[1])?;
        let stop = parse_quantity(parts[2])?;
        if !(step > 0.0) || stop < start {
            return Err(format!("range `{t}` must have step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    t.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_quantity)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RawParams;

    #[test]
    fn parses_sections_and_comments() {
        let cfg = ConfigFile::parse(
            "kind = coverage_curve # trailing\n\n[params]\nlambda_B = 10 lambda0\nN=400\n[sweep]\nvalues = 1,2,3\n",
        )
        .unwrap();
        assert_eq!(cfg.section("").get("kind").unwrap().0, "coverage_curve");
        let params = cfg.section("params");
        let mut raw = RawParams::default();
        raw.apply(&params).unwrap();
        assert!((raw.lambda_b - 5e-5).abs() < 1e-20);
        assert_eq!(raw.n, 400);
        assert_eq!(cfg.section("sweep").get("values").unwrap(), ("1,2,3", 7));
    }

    #[test]
    fn reports_line_numbers() {
        let err = ConfigFile::parse("a = 1\nnonsense\n").unwrap_err();
        assert_eq!(
            err,
            Error::Config {
                line: 2,
                reason: "expected `key = value`, got `nonsense`".into()
            }
        );
        let cfg = ConfigFile::parse("[params]\np = half\n").unwrap();
        let mut raw = RawParams::default();
        assert!(matches!(raw.apply(&cfg.section("params")), Err(Error::Config { line: 2, .. })));
    }

    #[test]
    fn quantities_and_grids() {
        assert_eq!(parse_quantity("2.5").unwrap(), 2.5);
        assert!((parse_quantity("80*lambda0").unwrap() - 4e-4).abs() < 1e-18);
        assert!((parse_quantity("lambda0").unwrap() - 5e-6).abs() < 1e-20);
        assert_eq!(parse_grid("0:0.25:1").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("-10:1:20").unwrap().len(), 31);
        assert_eq!(parse_grid("1, 2,5").unwrap(), vec![1.0, 2.0, 5.0]);
        assert!(parse_grid("1:0:2").is_err());
    }
}
