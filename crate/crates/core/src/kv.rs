//! Line-oriented `key = value` text used for configs and reports.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may repeat;
//! order is preserved. Errors carry the 1-based line number.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KvDocument {
    entries: Vec<Entry>,
    lines: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

impl KvDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut lines = 0;
        for (i, raw) in text.lines().enumerate() {
            lines = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Format {
                    line: i + 1,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = k.trim();
            if !valid_key(key) {
                return Err(Error::Format {
                    line: i + 1,
                    message: format!("invalid key `{key}`"),
                });
            }
            entries.push(Entry {
                key: key.to_string(),
                value: v.trim().to_string(),
                line: i + 1,
            });
        }
        Ok(Self { entries, lines })
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn get_all<'a, 'k>(&'a self, key: &'k str) -> impl Iterator<Item = &'a Entry> + use<'a, 'k> {
        self.entries.iter().filter(move |e| e.key == key)
    }

    /// The single entry for `key`; missing or duplicated keys are errors.
    pub fn require(&self, key: &str) -> Result<&Entry> {
        let mut it = self.get_all(key);
        let first = it.next().ok_or_else(|| Error::Format {
            line: self.lines,
            message: format!("missing required key `{key}`"),
        })?;
        if let Some(dup) = it.next() {
            return Err(Error::Format {
                line: dup.line,
                message: format!("duplicate key `{key}` (first on line {})", first.line),
            });
        }
        Ok(first)
    }

    pub fn require_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.require(key)?.parse()
    }

    pub fn optional_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        if self.get(key).is_none() {
            return Ok(None);
        }
        self.require_parsed(key).map(Some)
    }

    /// Rejects keys outside `allowed`.
    pub fn expect_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
            Some(e) => Err(Error::Format {
                line: e.line,
                message: format!("unknown key `{}`", e.key),
            }),
            None => Ok(()),
        }
    }
}

impl Entry {
    pub fn parse<T: std::str::FromStr>(&self) -> Result<T> {
        self.value.parse().map_err(|_| Error::Format {
            line: self.line,
            message: format!("cannot parse value `{}` of key `{}`", self.value, self.key),
        })
    }
}

/// Float with 17 significant digits; round-trips through `str::parse`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds `key = value` text in insertion order.
#[derive(Debug, Default)]
pub struct KvWriter {
    out: String,
}

impl KvWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        debug_assert!(valid_key(key));
        let v = value.to_string();
        debug_assert!(!v.contains('\n'));
        self.out.push_str(key);
        self.out.push_str(" = ");
        self.out.push_str(&v);
        self.out.push('\n');
        self
    }

    pub fn put_f64(&mut self, key: &str, x: f64) -> &mut Self {
        self.put(key, format_f64(x))
    }

    pub fn finish(self) -> String {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_repeats() {
        let d = KvDocument::parse("# c\nn = 5\n\nsample = 1 2\nsample=3 4\n").unwrap();
        assert_eq!(d.require_parsed::<u32>("n").unwrap(), 5);
        let s: Vec<_> = d.get_all("sample").map(|e| e.value.as_str()).collect();
        assert_eq!(s, ["1 2", "3 4"]);
        assert!(matches!(d.require("sample"), Err(Error::Format { line: 5, .. })));
    }

    #[test]
    fn line_numbers_in_errors() {
        assert!(matches!(KvDocument::parse("n = 5\nbogus\n"), Err(Error::Format { line: 2, .. })));
        let d = KvDocument::parse("n = five\n").unwrap();
        assert!(matches!(d.require_parsed::<u32>("n"), Err(Error::Format { line: 1, .. })));
        let d = KvDocument::parse("kind = euclidean\nc = 1\n").unwrap();
        match d.require("n") {
            Err(Error::Format { message, .. }) => assert!(message.contains("`n`")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn float_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, f64::MAX] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
