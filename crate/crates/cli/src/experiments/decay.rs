//! Decay rates of the normalized OU process `dX = -X dt + √2 dB` against
//! the containment radius: Kushner, spectral and asymptotic columns, plus an
//! optional Monte Carlo fit over several horizons.

use serde::{Deserialize, Serialize};

use pullbound::mc::{fit_decay_rate, McSettings};
use pullbound::sim::fork_seed;
use pullbound::spectral::{rate_table, SpectralConfig};
use pullbound::{DriftSpec, NoiseSpec};

use super::Experiment;
use crate::artifact::{opt, Csv};
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
    rates: Rates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mc: Option<Mc>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Rates {
    radii: Vec<f64>,
    #[serde(default = "default_n_grid")]
    n_grid: usize,
    #[serde(default = "default_refinement")]
    refinement: usize,
}

fn default_n_grid() -> usize {
    SpectralConfig::default().n_grid
}

fn default_refinement() -> usize {
    SpectralConfig::default().refinement
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Mc {
    #[serde(default = "default_paths")]
    n_paths: u64,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default = "yes")]
    bridge_correction: bool,
    #[serde(default = "default_horizons")]
    horizons: Vec<f64>,
}

fn default_paths() -> u64 {
    100_000
}
fn default_dt() -> f64 {
    1e-3
}
fn yes() -> bool {
    true
}
fn default_horizons() -> Vec<f64> {
    vec![5.0, 10.0, 15.0]
}

impl Config {
    fn validate(&self) -> Result<SpectralConfig, CliError> {
        for r in non_empty("rates.radii", &self.rates.radii)? {
            positive("rates.radii", *r)?;
        }
        let cfg = SpectralConfig {
            n_grid: self.rates.n_grid,
            refinement: self.rates.refinement,
        };
        cfg.validate().map_err(|e| config::in_section("rates", e))?;
        if let Some(mc) = &self.mc {
            at_least("mc.n_paths", mc.n_paths, 1)?;
            positive("mc.dt", mc.dt)?;
            if mc.horizons.len() < 2 {
                return Err(config::invalid("mc.horizons", "at least two horizons are required"));
            }
            if let Some(t) = mc.horizons.iter().find(|t| !(**t >= 1.0 && t.is_finite())) {
                return Err(config::invalid(
                    "mc.horizons",
                    format!("each horizon must be >= 1, got {t}"),
                ));
            }
        }
        Ok(cfg)
    }
}

pub struct FigDecay;

impl Experiment for FigDecay {
    fn name(&self) -> &'static str {
        "fig-decay"
    }

    fn about(&self) -> &'static str {
        "OU containment decay rates per radius (Kushner, spectral, asymptotic, optional Monte Carlo fit)"
    }

    fn default_output(&self) -> &'static str {
        "fig_decay.csv"
    }

    fn run(&self, text: &str, options: Options) -> Result<Outcome, CliError> {
        let mut cfg: Config = config::parse(text)?;
        if let Some(seed) = options.seed {
            cfg.seed = seed;
        }
        let spectral = cfg.validate()?;

        let table = rate_table(&cfg.rates.radii, spectral)?;
        let ou = DriftSpec::ou(1.0, 1)?;
        let noise = NoiseSpec::new(std::f64::consts::SQRT_2)?;

        let mut csv = Csv::new(self.name(), &cfg)?;
        csv.comment("process", "dX = -X dt + sqrt(2) dB, X0 = 0");
        if cfg.mc.is_some() {
            csv.comment("mc_seeds", "horizon j at radius i uses fork(fork(seed, i), j)");
        }
        let mut header: Vec<String> = ["R", "mu_kushner", "mu_spectral", "mu_asymptotic", "spectral_stderr"]
            .map(String::from)
            .to_vec();
        if let Some(mc) = &cfg.mc {
            header.extend(["mu_mc", "mu_mc_stderr", "mu_mc_lower_bound"].map(String::from));
            header.extend(mc.horizons.iter().map(|t| format!("p_hat_T{t}")));
        }
        header.push("status".into());
        csv.row(&header);

        for (i, row) in table.rows.iter().enumerate() {
            let mut cells = vec![
                row.radius.to_string(),
                row.mu_kushner.to_string(),
                opt(row.mu_spectral),
                row.mu_asymptotic.to_string(),
                opt(row.spectral_stderr),
            ];
            let mut status: Vec<String> = row.error.iter().map(|e| format!("spectral: {e}")).collect();
            if let Some(mc) = &cfg.mc {
                let settings = McSettings {
                    n_paths: mc.n_paths,
                    dt: mc.dt,
                    master_seed: fork_seed(cfg.seed, i as u64),
                    bridge_correction: mc.bridge_correction,
                };
                match fit_decay_rate(&ou, noise, &[0.0], row.radius, &mc.horizons, settings) {
                    Ok(fit) => {
                        cells.push(fit.rate.mu.to_string());
                        cells.push(opt(fit.rate.stderr));
                        cells.push(u8::from(fit.rate.lower_bound).to_string());
                        cells.extend(fit.estimates.iter().map(|e| e.p_hat.to_string()));
                    }
                    Err(e) => {
                        cells.extend(std::iter::repeat_n(String::new(), 3 + mc.horizons.len()));
                        status.push(format!("mc: {e}"));
                    }
                }
            }
            cells.push(if status.is_empty() {
                "ok".into()
            } else {
                status.join("; ").replace(',', ";")
            });
            csv.row(&cells);
        }
        Ok(Outcome::single(csv.into_bytes()))
    }
}
