//! Drift families, registered by name and built from configuration sections.
//!
//! A section is a flat key/value map. The `family` key selects the builder;
//! the remaining keys are family-specific:
//!
//! | family       | keys                                        |
//! |--------------|---------------------------------------------|
//! | `ou`         | `lambda`, optional `dimension` (default 1)  |
//! | `piecewise`  | `lambda_left`, `lambda_right`               |
//! | `expression` | `source` (expression in `x`)                |
//! | `radial`     | `source` (expression in `r`), `dimension`   |
//!
//! Unknown keys are rejected so typos do not silently fall back to defaults.

use std::collections::BTreeMap;

use super::DriftSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

pub type Params = BTreeMap<String, ParamValue>;

pub trait DriftFamily: Send + Sync {
    fn name(&self) -> &'static str;
    /// Keys this family accepts besides `family`.
    fn keys(&self) -> &'static [&'static str];
    fn build(&self, params: &Params) -> Result<DriftSpec>;
}

fn number(params: &Params, key: &'static str) -> Result<f64> {
    match params.get(key) {
        Some(ParamValue::Number(v)) => Ok(*v),
        Some(ParamValue::Text(_)) => Err(Error::invalid(key, "expected a number")),
        None => Err(Error::invalid(key, "missing")),
    }
}

fn text<'a>(params: &'a Params, key: &'static str) -> Result<&'a str> {
    match params.get(key) {
        Some(ParamValue::Text(s)) => Ok(s),
        Some(ParamValue::Number(_)) => Err(Error::invalid(key, "expected a string")),
        None => Err(Error::invalid(key, "missing")),
    }
}

fn dimension(params: &Params, default: usize) -> Result<usize> {
    match params.get("dimension") {
        None => Ok(default),
        Some(ParamValue::Number(v)) if *v >= 1.0 && v.fract() == 0.0 => Ok(*v as usize),
        Some(_) => Err(Error::invalid("dimension", "expected a positive integer")),
    }
}

struct OuFamily;

impl DriftFamily for OuFamily {
    fn name(&self) -> &'static str {
        "ou"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["lambda", "dimension"]
    }
    fn build(&self, params: &Params) -> Result<DriftSpec> {
        DriftSpec::ou(number(params, "lambda")?, dimension(params, 1)?)
    }
}

struct PiecewiseFamily;

impl DriftFamily for PiecewiseFamily {
    fn name(&self) -> &'static str {
        "piecewise"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["lambda_left", "lambda_right"]
    }
    fn build(&self, params: &Params) -> Result<DriftSpec> {
        DriftSpec::piecewise(number(params, "lambda_left")?, number(params, "lambda_right")?)
    }
}

struct ExpressionFamily;

impl DriftFamily for ExpressionFamily {
    fn name(&self) -> &'static str {
        "expression"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["source"]
    }
    fn build(&self, params: &Params) -> Result<DriftSpec> {
        DriftSpec::expression(text(params, "source")?)
    }
}

struct RadialFamily;

impl DriftFamily for RadialFamily {
    fn name(&self) -> &'static str {
        "radial"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["source", "dimension"]
    }
    fn build(&self, params: &Params) -> Result<DriftSpec> {
        DriftSpec::radial(text(params, "source")?, dimension(params, 2)?)
    }
}

pub struct DriftRegistry {
    families: BTreeMap<&'static str, Box<dyn DriftFamily>>,
}

impl DriftRegistry {
    pub fn empty() -> Self {
        Self {
            families: BTreeMap::new(),
        }
    }

    /// Registry with the four built-in families.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(OuFamily));
        reg.register(Box::new(PiecewiseFamily));
        reg.register(Box::new(ExpressionFamily));
        reg.register(Box::new(RadialFamily));
        reg
    }

    pub fn register(&mut self, family: Box<dyn DriftFamily>) {
        self.families.insert(family.name(), family);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.families.keys().copied()
    }

    pub fn build(&self, params: &Params) -> Result<DriftSpec> {
        let name = text(params, "family")?;
        let family = self.families.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::invalid(
                "family",
                format!("unknown family `{name}` (known: {})", known.join(", ")),
            )
        })?;
        if let Some(extra) = params
            .keys()
            .find(|k| k.as_str() != "family" && !family.keys().contains(&k.as_str()))
        {
            return Err(Error::invalid(
                "family",
                format!("key `{extra}` is not accepted by family `{name}`"),
            ));
        }
        family.build(params)
    }
}

impl Default for DriftRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
