//! Config files are TOML. Each experiment deserializes into its own typed
//! struct with unknown keys rejected, then validates value ranges before
//! any computation starts. Errors name the offending `section.key`.
//!
//! Drift sections use the keys of the core drift registry:
//!
//! ```toml
//! [drift]
//! family = "expression"   # ou | piecewise | expression | radial
//! source = "-x - x^3"
//! ```

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use pullbound::drift::{DriftRegistry, ParamValue, Params};
use pullbound::mc::McSettings;
use pullbound::{DriftSpec, Error};

use crate::CliError;

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
}

pub fn invalid(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{field}`: {message}"))
}

/// Maps a core validation error onto the config section it came from
/// (empty for top-level keys).
pub fn in_section(section: &str, err: Error) -> CliError {
    match err {
        Error::InvalidParameter { name, reason } if section.is_empty() => invalid(name, reason),
        Error::InvalidParameter { name, reason } => invalid(&format!("{section}.{name}"), reason),
        other => invalid(section, other),
    }
}

pub fn positive(field: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(field, format!("must be finite and > 0, got {value}")))
    }
}

pub fn at_least(field: &str, value: u64, min: u64) -> Result<u64, CliError> {
    if value >= min {
        Ok(value)
    } else {
        Err(invalid(field, format!("must be at least {min}, got {value}")))
    }
}

pub fn non_empty<'a, T>(field: &str, values: &'a [T]) -> Result<&'a [T], CliError> {
    if values.is_empty() {
        Err(invalid(field, "must not be empty"))
    } else {
        Ok(values)
    }
}

/// Builds a drift from a config section.
pub fn drift(section: &str, table: &toml::Table) -> Result<DriftSpec, CliError> {
    let mut params = Params::new();
    for (key, value) in table {
        let v = match value {
            toml::Value::Float(f) => ParamValue::Number(*f),
            toml::Value::Integer(i) => ParamValue::Number(*i as f64),
            toml::Value::String(s) => ParamValue::Text(s.clone()),
            other => {
                return Err(invalid(
                    &format!("{section}.{key}"),
                    format!("expected a number or string, got {}", other.type_str()),
                ))
            }
        };
        params.insert(key.clone(), v);
    }
    if !params.contains_key("family") {
        return Err(invalid(&format!("{section}.family"), "missing"));
    }
    DriftRegistry::builtin()
        .build(&params)
        .map_err(|e| in_section(section, e))
}

/// The drift's canonical section, as embedded in artifacts.
pub fn drift_table(spec: &DriftSpec) -> toml::Table {
    spec.to_params()
        .into_iter()
        .map(|(k, v)| {
            let value = match v {
                ParamValue::Number(n) if k == "dimension" => toml::Value::Integer(n as i64),
                ParamValue::Number(n) => toml::Value::Float(n),
                ParamValue::Text(s) => toml::Value::String(s),
            };
            (k, value)
        })
        .collect()
}

/// Monte Carlo settings section.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub n_paths: u64,
    pub dt: f64,
    #[serde(default = "yes")]
    pub bridge_correction: bool,
}

fn yes() -> bool {
    true
}

impl McSection {
    pub fn validate(&self, section: &str) -> Result<(), CliError> {
        at_least(&format!("{section}.n_paths"), self.n_paths, 1)?;
        positive(&format!("{section}.dt"), self.dt)?;
        Ok(())
    }

    pub fn settings(&self, seed: u64) -> McSettings {
        McSettings {
            n_paths: self.n_paths,
            dt: self.dt,
            master_seed: seed,
            bridge_correction: self.bridge_correction,
        }
    }
}
