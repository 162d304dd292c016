//! Flat `key = value` run configuration with `#` comments. Command-line
//! flags are merged on top of the file. Every key must be consumed by the
//! command that runs, so typos surface as errors instead of silent defaults.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("unknown key `{0}`")]
    Unknown(String),
    #[error("cannot read config file {path}: {source}")]
    Unreadable {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed line {line} (expected `key = value`): {text:?}")]
    Malformed { line: usize, text: String },
    #[error("duplicate key `{0}`")]
    Duplicate(String),
}

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    consumed: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn empty() -> Config {
        Config::default()
    }

    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Unreadable {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Config::empty();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: idx + 1,
                text: raw.to_string(),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::Malformed {
                    line: idx + 1,
                    text: raw.to_string(),
                });
            }
            if cfg
                .values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(ConfigError::Duplicate(key));
            }
        }
        Ok(cfg)
    }

    /// Flag override: replaces any file value for `key`.
    pub fn set(&mut self, key: &str, value: String) {
        self.values.insert(key.to_string(), value);
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        let v = self.values.get(key).map(String::as_str);
        if v.is_some() {
            self.consumed.borrow_mut().insert(key.to_string());
        }
        v
    }

    pub fn require_str(&self, key: &str) -> Result<&str, ConfigError> {
        self.get_str(key)
            .ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, raw: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        raw.parse().map_err(|e: T::Err| ConfigError::Invalid {
            key: key.to_string(),
            message: format!("{e} (got {raw:?})"),
        })
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, ConfigError> {
        let raw = self.require_str(key)?;
        self.parse(key, raw)
    }

    pub fn get_f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get_str(key) {
            Some(raw) => self.parse(key, raw),
            None => Ok(default),
        }
    }

    pub fn get_u64_or(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.get_str(key) {
            Some(raw) => self.parse(key, raw),
            None => Ok(default),
        }
    }

    pub fn require_usize(&self, key: &str) -> Result<usize, ConfigError> {
        let raw = self.require_str(key)?;
        self.parse(key, raw)
    }

    pub fn get_usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get_str(key) {
            Some(raw) => self.parse(key, raw),
            None => Ok(default),
        }
    }

    /// Comma-separated triple, e.g. `0,0,1`.
    pub fn get_vec3(&self, key: &str) -> Result<Option<[f64; 3]>, ConfigError> {
        let raw = match self.get_str(key) {
            Some(r) => r,
            None => return Ok(None),
        };
        let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(ConfigError::Invalid {
                key: key.to_string(),
                message: format!("expected three comma-separated numbers, got {raw:?}"),
            });
        }
        let mut v = [0.0; 3];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = self.parse(key, part)?;
        }
        Ok(Some(v))
    }

    /// Fails on any key no command consumed (typo protection).
    pub fn finish(&self) -> Result<(), ConfigError> {
        let consumed = self.consumed.borrow();
        for key in self.values.keys() {
            if !consumed.contains(key) {
                return Err(ConfigError::Unknown(key.clone()));
            }
        }
        Ok(())
    }
}
