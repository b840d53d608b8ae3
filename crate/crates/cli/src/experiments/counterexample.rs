//! Containment of the asymmetric drift `-λx` (x < 0), `-x` (x > 0) across
//! left pull strengths λ, plus the reflected-process reference.

use serde::{Deserialize, Serialize};

use pullbound::mc::{counterexample_sweep, reflected_reference, ContainmentEstimate, McSettings, Z99};

use super::Experiment;
use crate::artifact::Csv;
use crate::config::{self, at_least, non_empty, positive};
use crate::{CliError, Options, Outcome};

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default)]
    seed: u64,
    // Read by the binary before dispatch.
    #[allow(dead_code)]
    #[serde(default, skip_serializing)]
    output: Option<String>,
    #[serde(default)]
    sweep: Sweep,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
struct Sweep {
    lambdas: Vec<f64>,
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "T")]
    horizon: f64,
    n_paths: u64,
    /// Requested step; the stiffness guard lowers it to `0.5/λ` for large λ.
    dt: f64,
    bridge_correction: bool,
    reflected_reference: bool,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            lambdas: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1e3, 1e4],
            radius: 0.5,
            horizon: 1.0,
            n_paths: 200_000,
            dt: 1e-4,
            bridge_correction: true,
            reflected_reference: true,
        }
    }
}

impl Sweep {
    fn validate(&self) -> Result<McSettings, CliError> {
        for l in non_empty("sweep.lambdas", &self.lambdas)? {
            if !(*l >= 1.0 && l.is_finite()) {
                return Err(config::invalid(
                    "sweep.lambdas",
                    format!("each value must be >= 1, got {l}"),
                ));
            }
        }
        positive("sweep.R", self.radius)?;
        positive("sweep.T", self.horizon)?;
        positive("sweep.dt", self.dt)?;
        at_least("sweep.n_paths", self.n_paths, 1)?;
        if self.dt > self.horizon {
            return Err(config::invalid("sweep.dt", "must not exceed T"));
        }
        Ok(McSettings {
            n_paths: self.n_paths,
            dt: self.dt,
            master_seed: 0,
            bridge_correction: self.bridge_correction,
        })
    }
}

pub const HEADER: [&str; 13] = [
    "row",
    "lambda",
    "dt",
    "n_paths",
    "n_contained",
    "p_hat",
    "ci_low",
    "ci_high",
    "ci99_low",
    "ci99_high",
    "se",
    "n_overflow",
    "p_hat_raw",
];

fn cells(row: &str, lambda: &str, e: &ContainmentEstimate) -> Vec<String> {
    let (lo99, hi99) = e.interval(Z99);
    vec![
        row.into(),
        lambda.into(),
        e.dt.to_string(),
        e.n_paths.to_string(),
        e.n_contained.to_string(),
        e.p_hat.to_string(),
        e.ci_low.to_string(),
        e.ci_high.to_string(),
        lo99.to_string(),
        hi99.to_string(),
        e.standard_error().to_string(),
        e.n_overflow.to_string(),
        e.p_hat_raw.to_string(),
    ]
}

pub struct FigCounterexample;

impl Experiment for FigCounterexample {
    fn name(&self) -> &'static str {
        "fig-counterexample"
    }

    fn about(&self) -> &'static str {
        "containment of the asymmetric pull drift across left pull strengths, with the reflected reference"
    }

    fn default_output(&self) -> &'static str {
        "fig_counterexample.csv"
    }

    fn run(&self, text: &str, options: Options) -> Result<Outcome, CliError> {
        let mut cfg: Config = config::parse(text)?;
        if let Some(seed) = options.seed {
            cfg.seed = seed;
        }
        let settings = McSettings {
            master_seed: cfg.seed,
            ..cfg.sweep.validate()?
        };
        let s = &cfg.sweep;
        let sweep = counterexample_sweep(&s.lambdas, s.radius, s.horizon, settings)?;

        let mut csv = Csv::new(self.name(), &cfg)?;
        csv.comment("drift", "-lambda*x for x < 0; -x for x > 0; sigma = 1; X0 = 0");
        csv.comment("seeds", "paired: every lambda reuses path streams (seed, i)");
        csv.row(HEADER);
        for p in &sweep {
            csv.row(cells("sweep", &p.lambda.to_string(), &p.estimate));
        }
        if s.reflected_reference {
            let r = reflected_reference(s.radius, s.horizon, settings)?;
            csv.comment("reflected", "|X| for X = OU(1), sigma = 1; independent streams");
            csv.row(cells("reflected", "inf", &r));
        }
        Ok(Outcome::single(csv.into_bytes()))
    }
}
