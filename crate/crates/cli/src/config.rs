//! Flat `key=value` configuration files mirroring the command-line flags.
//!
//! Lines are `name=value` with the same names as the long flags
//! (`scenario=1`, `snr-min=-14`, `methods=cc,msif`, …). Blank lines and
//! `#` comments are ignored. Flags given on the command line override file
//! values.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}", path.display()), e))?;
        Self::parse(&text).map_err(|msg| {
            CliError::Config(format!("{}: {msg}", path.display()))
        })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Parse a value of type `T`, reporting the offending key on failure.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key '{key}': {e}"))),
        }
    }

    /// Comma-separated list value.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|item| {
                    item.trim()
                        .parse::<T>()
                        .map_err(|e| CliError::Config(format!("config key '{key}': {e}")))
                })
                .collect::<Result<Vec<T>, CliError>>()
                .map(Some),
        }
    }

    /// Keys that are not in the accepted set, for early typo detection.
    pub fn unknown_keys(&self, accepted: &[&str]) -> Vec<String> {
        let mut unknown: Vec<String> = self
            .values
            .keys()
            .filter(|k| !accepted.contains(&k.as_str()))
            .cloned()
            .collect();
        unknown.sort();
        unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_blanks() {
        let cfg = FileConfig::parse("# sweep\nscenario=2\n\nsnr-min = -14\nmethods=cc, msif\n")
            .unwrap();
        assert_eq!(cfg.get::<u8>("scenario").unwrap(), Some(2));
        assert_eq!(cfg.get::<f64>("snr-min").unwrap(), Some(-14.0));
        assert_eq!(
            cfg.get_list::<String>("methods").unwrap(),
            Some(vec!["cc".to_string(), "msif".to_string()])
        );
        assert_eq!(cfg.get::<u64>("seed").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines_and_values() {
        assert!(FileConfig::parse("scenario").is_err());
        let cfg = FileConfig::parse("trials=many").unwrap();
        assert!(cfg.get::<usize>("trials").is_err());
    }

    #[test]
    fn reports_unknown_keys() {
        let cfg = FileConfig::parse("trails=100\nseed=1").unwrap();
        assert_eq!(cfg.unknown_keys(&["seed", "trials"]), vec!["trails".to_string()]);
    }
}
