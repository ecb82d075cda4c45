//! Flat `key = value` configuration files.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. Keys not
//! mentioned keep their defaults. Overrides (from the command line) are
//! applied after the file, then the result is validated as a whole.

use std::fs;
use std::path::{Path, PathBuf};

use mapsel_core::{ConfigError, SimConfig};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: {source}")]
    Line { line: usize, source: ConfigError },
    #[error("override `{text}`: {source}")]
    Override { text: String, source: ConfigError },
    #[error("override `{0}`: expected `key=value`")]
    MalformedOverride(String),
    #[error(transparent)]
    Invalid(#[from] ConfigError),
}

impl ConfigFileError {
    /// Name of the offending key, when the error is about one.
    pub fn key(&self) -> Option<&str> {
        let inner = match self {
            ConfigFileError::Line { source, .. } | ConfigFileError::Override { source, .. } => source,
            ConfigFileError::Invalid(e) => e,
            _ => return None,
        };
        match inner {
            ConfigError::UnknownKey(k) => Some(k),
            ConfigError::BadValue { key, .. } => Some(key),
            ConfigError::Invalid { key, .. } => Some(key),
            ConfigError::UnknownStrategy(_) => Some("strategy"),
        }
    }
}

/// Splits one line into a pair; `None` for blank and comment-only lines.
fn split_line(raw: &str) -> Option<Result<(&str, &str), ()>> {
    let text = raw.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return None;
    }
    Some(match text.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => Ok((k.trim(), v.trim())),
        _ => Err(()),
    })
}

/// Applies the pairs in `text` on top of `base`. Does not validate.
pub fn apply_text(base: SimConfig, text: &str) -> Result<SimConfig, ConfigFileError> {
    let mut cfg = base;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        match split_line(raw) {
            None => {}
            Some(Err(())) => {
                return Err(ConfigFileError::Malformed {
                    line,
                    text: raw.trim().to_string(),
                })
            }
            Some(Ok((key, value))) => cfg
                .set(key, value)
                .map_err(|source| ConfigFileError::Line { line, source })?,
        }
    }
    Ok(cfg)
}

/// Parses a `key=value` override as given on the command line.
pub fn parse_override(text: &str) -> Result<(String, String), ConfigFileError> {
    match split_line(text) {
        Some(Ok((k, v))) => Ok((k.to_string(), v.to_string())),
        _ => Err(ConfigFileError::MalformedOverride(text.to_string())),
    }
}

/// Defaults, then the file (if any), then `overrides` in order; validated.
pub fn parse_config(
    path: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<SimConfig, ConfigFileError> {
    let mut cfg = SimConfig::default();
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        cfg = apply_text(cfg, &text)?;
    }
    for (key, value) in overrides {
        cfg.set(key, value).map_err(|source| ConfigFileError::Override {
            text: format!("{key}={value}"),
            source,
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Renders a config in the file format, every key present.
pub fn render_config(cfg: &SimConfig) -> String {
    let mut out = String::new();
    for (k, v) in cfg.to_key_values() {
        out.push_str(&k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    }
    out
}
