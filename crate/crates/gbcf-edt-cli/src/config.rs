//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Keys mirror the long CLI
//! flags (snake_case); unknown keys and malformed lines are errors that
//! name the offending line. Precedence is CLI flag > config file >
//! built-in default, resolved in [`crate::main`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Keys the loader accepts, mirroring the CLI flags.
const KNOWN_KEYS: &[&str] = &[
    "sigma_s2",
    "rho_s",
    "sigma_z2",
    "rho_z",
    "d",
    "power",
    "samples",
    "seed",
    "max_steps",
    "format",
    "output",
    "threads",
    "d_min",
    "d_max",
    "d_points",
    "rho_s_grid",
    "rho_z_grid",
    "power_grid",
    "kind",
    "trajectory",
];

#[derive(Debug)]
pub struct ConfigError {
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(message: String) -> ConfigError {
    ConfigError { message }
}

/// Parsed file: raw string values keyed by known option name.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                err(format!("{origin}:{line_no}: expected `key = value`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(err(format!("{origin}:{line_no}: unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(err(format!("{origin}:{line_no}: empty value for `{key}`")));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(err(format!("{origin}:{line_no}: duplicate key `{key}`")));
            }
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| err(format!("config key `{key}`: `{v}` is not a number")))
            })
            .transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| err(format!("config key `{key}`: `{v}` is not a nonnegative integer")))
            })
            .transpose()
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| err(format!("config key `{key}`: `{v}` is not a nonnegative integer")))
            })
            .transpose()
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.get(key).map(str::to_string)
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.get(key).map(|v| parse_f64_list(v, key)).transpose()
    }
}

/// Parse a comma-separated float list (shared with the CLI flags).
pub fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| err(format!("{what}: `{s}` is not a number")))
        })
        .collect()
}
