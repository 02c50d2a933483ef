//! `key = value` configuration files. Keys are the long flag names without
//! the leading dashes (`T`, `target-len`, ...); underscores are accepted in
//! place of dashes. Blank lines and `#` comments are ignored, and values may
//! be wrapped in double quotes.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::{CliError, Result};

#[derive(Clone, Debug, Default)]
pub struct Config {
    path: PathBuf,
    values: HashMap<String, (String, u64)>,
}

impl Config {
    pub fn load(path: &Path, known_keys: &[&str]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::file(path))?;
        Self::parse(&text, path, known_keys)
    }

    pub fn parse(text: &str, path: &Path, known_keys: &[&str]) -> Result<Self> {
        let err = |line: u64, message: String| CliError::Input { path: path.to_path_buf(), line, message };
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i as u64 + 1;
            let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err(line_no, format!("expected key = value, found {line:?}")))?;
            let key = key.trim().replace('_', "-");
            if !known_keys.contains(&key.as_str()) {
                return Err(err(line_no, format!("unknown key {key:?}")));
            }
            let value = value.trim();
            let value = value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value);
            if values.insert(key.clone(), (value.to_string(), line_no)).is_some() {
                return Err(err(line_no, format!("duplicate key {key:?}")));
            }
        }
        Ok(Self { path: path.to_path_buf(), values })
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let Some((raw, line)) = self.values.get(key) else { return Ok(None) };
        raw.parse().map(Some).map_err(|e| CliError::Input {
            path: self.path.clone(),
            line: *line,
            message: format!("bad value {raw:?} for {key}: {e}"),
        })
    }

    /// `true`/`false` (or `1`/`0`, `yes`/`no`).
    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        let Some((raw, line)) = self.values.get(key) else { return Ok(None) };
        match raw.to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => Ok(Some(true)),
            "false" | "0" | "no" => Ok(Some(false)),
            _ => Err(CliError::Input {
                path: self.path.clone(),
                line: *line,
                message: format!("bad boolean {raw:?} for {key}"),
            }),
        }
    }
}
