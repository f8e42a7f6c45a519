//! Flat key-value parameter files.
//!
//! One `key = value` pair per line; `#` starts a comment, blank lines are
//! skipped. Recognized keys: `g`, `kappa`, `gamma`, `chi`, `omega_drive`,
//! `delta_cav`, `delta_atom`, `pump`. All numeric values are decimal, in
//! units of ν; `pump` is `cavity` or `atom`. Unset keys keep their current
//! (or default) values, so a file can be partial and command-line flags can
//! override it afterwards.

use thiserror::Error;

use crate::params::SystemParams;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: bad value `{value}` for `{key}`: {reason}")]
    BadValue { line: usize, key: String, value: String, reason: String },
}

/// Parse a config file into fresh (all-zero, cavity-pumped) parameters.
pub fn parse_config(text: &str) -> Result<SystemParams, ConfigError> {
    let mut params = SystemParams::default();
    parse_config_into(&mut params, text)?;
    Ok(params)
}

/// Apply a config file on top of existing parameters.
pub fn parse_config_into(params: &mut SystemParams, text: &str) -> Result<(), ConfigError> {
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line, text: content.to_string() });
        };
        let (key, value) = (key.trim(), value.trim());
        apply_key(params, key, value).map_err(|reason| match reason {
            KeyError::Unknown => ConfigError::UnknownKey { line, key: key.to_string() },
            KeyError::Value(reason) => ConfigError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
                reason,
            },
        })?;
    }
    Ok(())
}

enum KeyError {
    Unknown,
    Value(String),
}

fn apply_key(params: &mut SystemParams, key: &str, value: &str) -> Result<(), KeyError> {
    let numeric = |value: &str| {
        value
            .parse::<f64>()
            .map_err(|e| KeyError::Value(e.to_string()))
    };
    match key {
        "g" => params.g = numeric(value)?,
        "kappa" => params.kappa = numeric(value)?,
        "gamma" => params.gamma = numeric(value)?,
        "chi" => params.chi = numeric(value)?,
        "omega_drive" => params.omega_drive = numeric(value)?,
        "delta_cav" => params.delta_cav = numeric(value)?,
        "delta_atom" => params.delta_atom = numeric(value)?,
        "pump" => params.pump = value.parse().map_err(KeyError::Value)?,
        _ => return Err(KeyError::Unknown),
    }
    Ok(())
}
