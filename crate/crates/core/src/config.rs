//! Flat `key = value` run configuration files.
//!
//! One assignment per line; `#` starts a comment; blank lines are skipped.
//! Keys may not repeat. Values are typed at the call site, so a bad value
//! is reported with the key that held it.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config key '{0}' is required")]
    Missing(String),
    #[error("config key '{key}': {msg}")]
    Value { key: String, msg: String },
    #[error("unknown config key '{0}'")]
    Unknown(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let Some((key, value)) = t.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    msg: format!("expected key = value, got '{t}'"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(ConfigError::Parse { line, msg: "empty key".into() });
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::Parse {
                    line,
                    msg: format!("duplicate key '{key}'"),
                });
            }
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    fn typed<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| ConfigError::Value {
                key: key.to_string(),
                msg: format!("'{v}' is not {what}"),
            }),
        }
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.typed(key, "an unsigned integer")
    }

    pub fn get_u32(&self, key: &str) -> Result<Option<u32>, ConfigError> {
        self.typed(key, "an unsigned integer")
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.typed(key, "an unsigned integer")
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.typed(key, "a number")
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(v) => Err(ConfigError::Value {
                key: key.to_string(),
                msg: format!("'{v}' is not true or false"),
            }),
        }
    }

    /// Rejects any key outside the allowed set, so typos fail loudly
    /// instead of silently falling back to defaults.
    pub fn check_known(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for key in self.entries.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError::Unknown(key.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_assignments_comments_and_blanks() {
        let c = Config::parse("# run setup\nn = 20\n\nname=er-suite # not a comment\n").unwrap();
        assert_eq!(c.get("n"), Some("20"));
        // Trailing text is part of the value; comments only start a line.
        assert_eq!(c.get("name"), Some("er-suite # not a comment"));
        assert_eq!(c.get("missing"), None);
    }

    #[test]
    fn typed_getters() {
        let c = Config::parse("a = 7\nb = 0.25\nc = true\nd = hello\n").unwrap();
        assert_eq!(c.get_u64("a").unwrap(), Some(7));
        assert_eq!(c.get_f64("b").unwrap(), Some(0.25));
        assert_eq!(c.get_bool("c").unwrap(), Some(true));
        assert_eq!(c.get_u64("missing").unwrap(), None);
        assert!(matches!(c.get_u64("d"), Err(ConfigError::Value { key, .. }) if key == "d"));
        assert!(matches!(c.get_bool("a"), Err(ConfigError::Value { .. })));
    }

    #[test]
    fn require_reports_the_key() {
        let c = Config::parse("").unwrap();
        assert!(matches!(c.require("dist"), Err(ConfigError::Missing(k)) if k == "dist"));
    }

    #[test]
    fn duplicate_keys_are_rejected_with_line() {
        let err = Config::parse("a = 1\na = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }));
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(Config::parse("just words\n").is_err());
        assert!(Config::parse("= value\n").is_err());
    }

    #[test]
    fn empty_value_is_allowed() {
        let c = Config::parse("prefix =\n").unwrap();
        assert_eq!(c.get("prefix"), Some(""));
    }

    #[test]
    fn unknown_keys_flagged() {
        let c = Config::parse("n = 3\ntypo = 1\n").unwrap();
        assert!(c.check_known(&["n", "param"]).is_err());
        assert!(c.check_known(&["n", "typo"]).is_ok());
    }
}
