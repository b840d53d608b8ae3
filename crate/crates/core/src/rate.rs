//! Containment decay rates and the registry of methods that produce them.
//!
//! Every method answers the same question: for the normalized OU process
//! `dX = -X dt + √2 dB`, `X₀ = 0`, at which exponential rate `μ(R)` does
//! `P(sup_{t≤T} |X_t| ≤ R)` decay in `T`? Methods are registered by name
//! (`kushner`, `spectral`, `asymptotic`, `mc-fit`) and selected at runtime.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMethodKind {
    Kushner,
    Spectral,
    Asymptotic,
    McFit,
}

impl RateMethodKind {
    pub fn name(self) -> &'static str {
        match self {
            RateMethodKind::Kushner => "kushner",
            RateMethodKind::Spectral => "spectral",
            RateMethodKind::Asymptotic => "asymptotic",
            RateMethodKind::McFit => "mc-fit",
        }
    }
}

impl fmt::Display for RateMethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    /// Decay rate in 1/time. Non-negative.
    pub mu: f64,
    pub method: RateMethodKind,
    pub stderr: Option<f64>,
    /// Set when the data only support `μ ≥ mu` (a Monte Carlo fit with an
    /// empty containment count).
    pub lower_bound: bool,
}

impl RateEstimate {
    pub fn exact(mu: f64, method: RateMethodKind) -> Self {
        Self {
            mu,
            method,
            stderr: None,
            lower_bound: false,
        }
    }
}

/// A strategy producing the normalized OU decay rate at a given radius.
pub trait RateMethod: Send + Sync {
    fn kind(&self) -> RateMethodKind;

    fn name(&self) -> &'static str {
        self.kind().name()
    }

    /// Whether `e^{-μT}` is a proven lower bound on containment (as opposed
    /// to an approximation valid for large `T`).
    fn is_guaranteed(&self) -> bool {
        false
    }

    fn rate(&self, radius: f64) -> Result<RateEstimate>;
}

/// Decay rate of `dX = -λX dt + σ_ou dB` at radius `R`, obtained from a
/// normalized method by the change of variables `s = λt`,
/// `Y = X √(2λ)/σ_ou`, which maps the problem to the normalized process at
/// radius `R √(2λ)/σ_ou`.
pub fn scaled_ou_rate(method: &dyn RateMethod, lambda: f64, sigma_ou: f64, radius: f64) -> Result<RateEstimate> {
    require_positive("lambda", lambda)?;
    require_positive("sigma", sigma_ou)?;
    require_positive("R", radius)?;
    let normalized = method.rate(radius * (2.0 * lambda).sqrt() / sigma_ou)?;
    Ok(RateEstimate {
        mu: lambda * normalized.mu,
        stderr: normalized.stderr.map(|s| lambda * s),
        ..normalized
    })
}

#[derive(Default)]
pub struct RateMethodRegistry {
    methods: BTreeMap<&'static str, Box<dyn RateMethod>>,
}

impl RateMethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, method: Box<dyn RateMethod>) -> &mut Self {
        self.methods.insert(method.name(), method);
        self
    }

    pub fn get(&self, name: &str) -> Result<&dyn RateMethod> {
        self.methods.get(name).map(|m| m.as_ref()).ok_or_else(|| {
            Error::invalid(
                "rate_method",
                format!(
                    "unknown method `{name}` (known: {})",
                    self.names().collect::<Vec<_>>().join(", ")
                ),
            )
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.methods.keys().copied()
    }
}
