//! Flat `key = value` settings: a config file overlaid by command-line flags.
//!
//! Every key a command reads is recorded with the value it resolved to, so the
//! JSON output can echo the complete effective configuration. Keys that were
//! supplied but never read are reported as errors to catch typos.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeMap<String, String>>,
}

fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got {raw:?}", i + 1)))?;
            let key = normalize_key(k);
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", i + 1)));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key {key:?}", i + 1)));
            }
        }
        Ok(Settings { values, used: RefCell::default() })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("reading {}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    /// Overrides `key` (command-line values win over the file).
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(normalize_key(key), value.into());
    }

    pub fn set_opt<T: Display>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.set(key, v.to_string());
        }
    }

    fn record(&self, key: &str, value: &str) {
        self.used.borrow_mut().insert(key.to_string(), value.to_string());
    }

    pub fn text(&self, key: &str) -> Option<String> {
        let v = self.values.get(key)?.clone();
        self.record(key, &v);
        Some(v)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.text(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| CliError::Config(format!("{key} = {v:?}: {e}"))),
        }
    }

    pub fn get_or<T>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.get(key)? {
            Some(v) => Ok(v),
            None => {
                self.record(key, &default.to_string());
                Ok(default)
            }
        }
    }

    pub fn require<T>(&self, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| CliError::Config(format!("missing setting {key:?}")))
    }

    /// Supplied keys not read so far.
    pub fn unread(&self) -> Vec<(String, String)> {
        let used = self.used.borrow();
        self.values.iter().filter(|(k, _)| !used.contains_key(*k)).map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    pub fn mark_read(&self, key: &str) {
        if let Some(v) = self.values.get(key) {
            self.record(key, v);
        }
    }

    pub fn echo(&self) -> BTreeMap<String, String> {
        self.used.borrow().clone()
    }
}

/// Comma-separated positive sizes, strictly increasing.
pub fn parse_grid(text: &str) -> Result<Vec<usize>, CliError> {
    let grid = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|e| CliError::Config(format!("n grid entry {s:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(format!("n grid {text:?} must be non-empty and strictly increasing")));
    }
    Ok(grid)
}

pub fn parse_list(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut s = Settings::parse("# comment\nreps = 100\nlaw=bs  # inline\nk-max = 3\n").unwrap();
        s.set("reps", "500");
        assert_eq!(s.get_or("reps", 1u64).unwrap(), 500);
        assert_eq!(s.text("law").as_deref(), Some("bs"));
        assert_eq!(s.get_or("seed", 7u64).unwrap(), 7);
        let unread = s.unread();
        assert_eq!(unread, vec![("k_max".to_string(), "3".to_string())]);
        assert_eq!(s.echo().get("seed").map(String::as_str), Some("7"));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Settings::parse("reps 100").is_err());
        assert!(Settings::parse("a=1\na=2").is_err());
        assert!(Settings::parse("=3").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("10, 100,1000").unwrap(), vec![10, 100, 1000]);
        assert!(parse_grid("100,10").is_err());
        assert!(parse_grid("").is_err());
    }
}
