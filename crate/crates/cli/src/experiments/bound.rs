//! Containment bound for the gap between two copies of a contracting
//! system: estimate the contraction rate λ, confirm OU(λ) dominance on the
//! sampled domain, evaluate the OU(λ, √2σ) rate, and compare with a direct
//! Monte Carlo estimate of the gap.

use serde::{Deserialize, Serialize};
use serde_json::json;

use pullbound::dominance::{
    check_ou_dominance, contraction_rate, contraction_to_ou_bound, GridParams, OuBound, Verdict,
};
use pullbound::drift::DriftForm;
use pullbound::mc::distance_containment;
use pullbound::spectral::{analytic_methods, SpectralConfig};
use pullbound::{ContainmentQuery, NoiseSpec};

use super::Experiment;
use crate::artifact::json as json_artifact;
use crate::config::{self, at_least, drift, drift_table, in_section, positive, McSection};
use crate::{CliError, Options, Outcome};

/// Relative amount taken off an estimated contraction rate before it is
/// used, absorbing finite-difference error in the estimate.
const RATE_SAFETY: f64 = 1e-6;

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default)]
    seed: u64,
    // Read by the binary before dispatch.
    #[allow(dead_code)]
    #[serde(default, skip_serializing)]
    output: Option<String>,
    /// `kushner`, `spectral` or `asymptotic`.
    #[serde(default = "default_method")]
    rate_method: String,
    drift: toml::Table,
    noise: Noise,
    query: Query,
    #[serde(default)]
    contraction: Contraction,
    #[serde(default)]
    dominance: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mc: Option<McSection>,
}

fn default_method() -> String {
    "asymptotic".into()
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Noise {
    sigma: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Query {
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "T")]
    horizon: f64,
    /// Half-width of the sampled box; defaults to `R`.
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    check_radius: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
struct Contraction {
    n_samples: usize,
    fd_step: f64,
}

impl Default for Contraction {
    fn default() -> Self {
        Self {
            n_samples: 256,
            fd_step: 1e-5,
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
struct Grid {
    n_grid: usize,
    n_radial: usize,
    n_sphere: usize,
}

impl Default for Grid {
    fn default() -> Self {
        let g = GridParams::default();
        Self {
            n_grid: g.n_grid,
            n_radial: g.n_radial,
            n_sphere: g.n_sphere,
        }
    }
}

pub struct Bound;

impl Experiment for Bound {
    fn name(&self) -> &'static str {
        "bound"
    }

    fn about(&self) -> &'static str {
        "containment bound for the gap between two copies of a contracting system, with a Monte Carlo check"
    }

    fn default_output(&self) -> &'static str {
        "bound.json"
    }

    fn run(&self, text: &str, options: Options) -> Result<Outcome, CliError> {
        let mut cfg: Config = config::parse(text)?;
        if let Some(seed) = options.seed {
            cfg.seed = seed;
        }
        let f = drift("drift", &cfg.drift)?;
        let noise = NoiseSpec::new(cfg.noise.sigma).map_err(|e| in_section("noise", e))?;
        let k = cfg.query.check_radius.unwrap_or(cfg.query.radius);
        let query =
            ContainmentQuery::new(cfg.query.radius, cfg.query.horizon, k).map_err(|e| in_section("query", e))?;
        cfg.query.check_radius = Some(k);
        let methods = analytic_methods(SpectralConfig::default());
        let method = methods.get(&cfg.rate_method).map_err(|e| in_section("", e))?;
        at_least("contraction.n_samples", cfg.contraction.n_samples as u64, 1)?;
        positive("contraction.fd_step", cfg.contraction.fd_step)?;
        let d = &cfg.dominance;
        if d.n_grid < 3 || d.n_radial < 2 || d.n_sphere < 1 {
            return Err(config::invalid(
                "dominance",
                "need n_grid >= 3, n_radial >= 2, n_sphere >= 1",
            ));
        }
        if let Some(mc) = &cfg.mc {
            mc.validate("mc")?;
        }
        cfg.drift = drift_table(&f);

        let estimate = contraction_rate(&f, k, cfg.contraction.n_samples, cfg.contraction.fd_step, cfg.seed)?;
        // OU drifts contract at exactly their pull strength.
        let (lambda, lambda_source) = match *f.form() {
            DriftForm::Ou { lambda } => (lambda, "closed form"),
            _ => (
                estimate.lambda_hat * (1.0 - RATE_SAFETY),
                "estimate, reduced by a relative 1e-6",
            ),
        };

        let mut body = json!({
            "contraction": estimate,
            "lambda": lambda,
            "lambda_source": lambda_source,
        });
        let fields = body.as_object_mut().expect("object literal");

        if lambda <= 0.0 {
            fields.insert("verdict".into(), json!(Verdict::Violated));
            fields.insert("witness".into(), json!(estimate.min_witness));
            fields.insert("dominance".into(), serde_json::Value::Null);
            fields.insert("bound".into(), serde_json::Value::Null);
            fields.insert("monte_carlo".into(), serde_json::Value::Null);
            let reason = format!(
                "drift is not contracting on {}: largest Jacobian eigenvalue {} at {:?}",
                estimate.domain, -estimate.lambda_hat, estimate.min_witness
            );
            return Ok(Outcome {
                refusal: Some(reason),
                ..Outcome::single(json_artifact(self.name(), &cfg, body)?)
            });
        }

        let grid = GridParams {
            n_grid: d.n_grid,
            n_radial: d.n_radial,
            n_sphere: d.n_sphere,
            seed: cfg.seed,
        };
        let report = check_ou_dominance(&f, lambda, k, grid)?;
        fields.insert("verdict".into(), json!(report.verdict));
        fields.insert("witness".into(), json!(report.witnesses[0].point));
        fields.insert("dominance".into(), json!(report));

        let mut refusal = None;
        let bound: Option<OuBound> = if report.verdict == Verdict::Holds || options.force {
            Some(contraction_to_ou_bound(
                lambda,
                noise,
                query.radius,
                query.horizon,
                method,
            )?)
        } else {
            refusal = Some(format!(
                "OU({lambda}) dominance fails on radius {k}: margin {}, witness {:?}",
                report.margin, report.witnesses[0].point
            ));
            None
        };
        fields.insert("bound".into(), json!(bound));

        let mc = match &cfg.mc {
            Some(mc) => {
                let x0 = vec![0.0; f.dimension()];
                let e = distance_containment(&f, noise, &x0, query.radius, query.horizon, mc.settings(cfg.seed))?;
                let se = e.standard_error();
                let respects = bound.as_ref().map(|b| e.p_hat >= b.probability - 3.0 * se);
                json!({
                    "quantity": "P(sup_{t<=T} |Y_t - X_t| <= R), two copies from the origin with independent noise",
                    "estimate": e,
                    "standard_error": se,
                    "respects_bound": respects,
                })
            }
            None => serde_json::Value::Null,
        };
        fields.insert("monte_carlo".into(), mc);

        Ok(Outcome {
            refusal,
            ..Outcome::single(json_artifact(self.name(), &cfg, body)?)
        })
    }
}
