//! Containment decay rates of the normalized OU process
//! `dX = -X dt + √2 dB` in the interval `[-R, R]`.
//!
//! * Kushner: `μ_K = 2/R²`; `e^{-μ_K T}` is a guaranteed lower bound.
//! * Spectral: `μ_D`, the smallest `ν` with a nontrivial solution of
//!   `y'' - x y' = -ν y`, `y(±R) = 0`; containment decays like `e^{-μ_D T}`.
//! * Asymptotic: `R/√(2π) · e^{-R²/2}`, the large-`R` closed form.

pub mod solver;

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::rate::{RateEstimate, RateMethod, RateMethodKind, RateMethodRegistry};
use solver::{Domain, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectralConfig {
    /// Interior points of the coarsest grid on `[-R, R]`; odd, ≥ 3.
    pub n_grid: usize,
    /// Number of grid halvings used for Richardson extrapolation.
    pub refinement: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            n_grid: 4001,
            refinement: 2,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid < 3 || self.n_grid.is_multiple_of(2) {
            return Err(Error::invalid(
                "n_grid",
                format!("must be odd and at least 3, got {}", self.n_grid),
            ));
        }
        if self.refinement > 8 {
            return Err(Error::invalid("refinement", "at most 8 halvings"));
        }
        Ok(())
    }
}

pub fn kushner_rate(radius: f64) -> Result<RateEstimate> {
    require_positive("R", radius)?;
    Ok(RateEstimate::exact(2.0 / (radius * radius), RateMethodKind::Kushner))
}

pub fn asymptotic_rate(radius: f64) -> Result<RateEstimate> {
    require_positive("R", radius)?;
    let mu = radius / (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * radius * radius).exp();
    Ok(RateEstimate::exact(mu, RateMethodKind::Asymptotic))
}

pub fn sturm_liouville_rate(radius: f64, cfg: SpectralConfig) -> Result<RateEstimate> {
    sturm_liouville_rate_with(radius, cfg, Weight::Gaussian, Domain::Symmetric)
}

/// [`sturm_liouville_rate`] with the weight and domain exposed: `Unit`
/// drops the `-x y'` term, `HalfNeumann` folds the even problem onto `[0, R]`.
pub fn sturm_liouville_rate_with(
    radius: f64,
    cfg: SpectralConfig,
    weight: Weight,
    domain: Domain,
) -> Result<RateEstimate> {
    require_positive("R", radius)?;
    cfg.validate()?;
    let (mu, stderr) = solver::extrapolated_eigenvalue(radius, cfg.n_grid, cfg.refinement, weight, domain)?;
    Ok(RateEstimate {
        mu: mu.max(0.0),
        method: RateMethodKind::Spectral,
        stderr,
        lower_bound: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Guaranteed,
    AsymptoticApproximation,
}

impl BoundKind {
    pub fn label(self) -> &'static str {
        match self {
            BoundKind::Guaranteed => "guaranteed lower bound",
            BoundKind::AsymptoticApproximation => "asymptotic approximation, recommended T >= 5",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContainmentBound {
    pub probability: f64,
    pub method: RateMethodKind,
    pub kind: BoundKind,
}

/// `e^{-μT}`. Only the Kushner rate makes this a proven bound.
pub fn containment_lower_bound(rate: &RateEstimate, horizon: f64) -> Result<ContainmentBound> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::invalid("T", format!("must be finite and >= 0, got {horizon}")));
    }
    if !(rate.mu >= 0.0) {
        return Err(Error::invalid("mu", format!("must be >= 0, got {}", rate.mu)));
    }
    let kind = if rate.method == RateMethodKind::Kushner {
        BoundKind::Guaranteed
    } else {
        BoundKind::AsymptoticApproximation
    };
    Ok(ContainmentBound {
        probability: (-rate.mu * horizon).exp(),
        method: rate.method,
        kind,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KushnerMethod;

impl RateMethod for KushnerMethod {
    fn kind(&self) -> RateMethodKind {
        RateMethodKind::Kushner
    }
    fn is_guaranteed(&self) -> bool {
        true
    }
    fn rate(&self, radius: f64) -> Result<RateEstimate> {
        kushner_rate(radius)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SpectralMethod(pub SpectralConfig);

impl RateMethod for SpectralMethod {
    fn kind(&self) -> RateMethodKind {
        RateMethodKind::Spectral
    }
    fn rate(&self, radius: f64) -> Result<RateEstimate> {
        sturm_liouville_rate(radius, self.0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AsymptoticMethod;

impl RateMethod for AsymptoticMethod {
    fn kind(&self) -> RateMethodKind {
        RateMethodKind::Asymptotic
    }
    fn rate(&self, radius: f64) -> Result<RateEstimate> {
        asymptotic_rate(radius)
    }
}

/// Registry holding `kushner`, `spectral` and `asymptotic`.
pub fn analytic_methods(cfg: SpectralConfig) -> RateMethodRegistry {
    let mut reg = RateMethodRegistry::new();
    reg.register(Box::new(KushnerMethod))
        .register(Box::new(SpectralMethod(cfg)))
        .register(Box::new(AsymptoticMethod));
    reg
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    #[serde(rename = "R")]
    pub radius: f64,
    pub mu_kushner: f64,
    /// `None` when the solver failed; see `error`.
    pub mu_spectral: Option<f64>,
    pub spectral_stderr: Option<f64>,
    pub mu_asymptotic: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

pub const RATE_TABLE_HEADER: &str = "R,mu_kushner,mu_spectral,mu_asymptotic";

/// All three rates at each radius. A solver failure leaves that row's
/// spectral entry empty instead of failing the table.
pub fn rate_table(radii: &[f64], cfg: SpectralConfig) -> Result<RateTable> {
    if radii.is_empty() {
        return Err(Error::invalid("radii", "at least one radius is required"));
    }
    cfg.validate()?;
    let rows = radii
        .iter()
        .map(|&r| {
            let spectral = sturm_liouville_rate(r, cfg);
            Ok(RateRow {
                radius: r,
                mu_kushner: kushner_rate(r)?.mu,
                mu_spectral: spectral.as_ref().ok().map(|e| e.mu),
                spectral_stderr: spectral.as_ref().ok().and_then(|e| e.stderr),
                mu_asymptotic: asymptotic_rate(r)?.mu,
                error: spectral.err().map(|e| e.to_string()),
            })
        })
        .collect::<Result<_>>()?;
    Ok(RateTable { rows })
}

impl RateTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{RATE_TABLE_HEADER}")?;
        for row in &self.rows {
            let spectral = row.mu_spectral.map(|v| format!("{v:e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{:e},{},{:e}",
                row.radius, row.mu_kushner, spectral, row.mu_asymptotic
            )?;
        }
        Ok(())
    }
}
