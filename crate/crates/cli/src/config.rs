//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are skipped. Keys are unique.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use mkdv_core::{Error, Result};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value, got `{line}`", i + 1)));
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("key `{key}` given twice")));
            }
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        Config::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Parsed value of `key`, or `default` when absent.
    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_value(key, v),
        }
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key).map(|v| parse_value(key, v)).transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        match self.raw(key) {
            None => Err(Error::Config(format!("missing key `{key}`"))),
            Some(v) => parse_value(key, v),
        }
    }

    /// Comma-separated list; absent or empty gives an empty list.
    pub fn list(&self, key: &str) -> Vec<String> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Rejects keys outside `allowed`, naming the first offender.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }

    /// SHA-256 of the canonical `key=value` lines, hex.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.entries {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key `{key}`: cannot parse `{value}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_hashes() {
        let c = Config::parse("# plan\ns = 0.125\n\np=4\n").unwrap();
        assert_eq!(c.require::<f64>("s").unwrap(), 0.125);
        assert_eq!(c.get_or("T", 1.0).unwrap(), 1.0);
        let d = Config::parse("p = 4\ns=0.125").unwrap();
        assert_eq!(c.hash(), d.hash());
    }

    #[test]
    fn errors_name_the_key() {
        let c = Config::parse("dt = fast").unwrap();
        let e = c.require::<f64>("dt").unwrap_err().to_string();
        assert!(e.contains("`dt`"), "{e}");
        let e = c.check_keys(&["T"]).unwrap_err().to_string();
        assert!(e.contains("`dt`"), "{e}");
        assert!(Config::parse("a = 1\na = 2").is_err());
        assert!(Config::parse("novalue").is_err());
    }

    #[test]
    fn lists() {
        let c = Config::parse("probes = resonance, trilinear,\nempty =").unwrap();
        assert_eq!(c.list("probes"), ["resonance", "trilinear"]);
        assert!(c.list("empty").is_empty());
        assert!(c.list("absent").is_empty());
    }
}
