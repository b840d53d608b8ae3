//! Stylized 2-d trap: radial pull `-k r` inside the beam radius, no force
//! outside. Writes sample trajectories with exit flags and, optionally,
//! Monte Carlo containment for the trap and a reference trap.

use serde::{Deserialize, Serialize};

use pullbound::dominance::{check_dominance, GridParams};
use pullbound::mc::{containment_probability, pooled_se, ContainmentEstimate};
use pullbound::sim::{first_exit, integrate, PlainNoise, TimeGrid};
use pullbound::{DriftSpec, NoiseSpec, RngStream};

use super::Experiment;
use crate::artifact::{Artifact, Csv};
use crate::config::{self, at_least, positive, McSection};
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
    trap: Trap,
    /// Weaker trap to compare containment against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference: Option<Trap>,
    noise: Noise,
    run: Run,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mc: Option<McSection>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Trap {
    /// Pull strength `k` inside the beam.
    strength: f64,
    beam_radius: f64,
}

impl Trap {
    fn validate(&self, section: &str) -> Result<DriftSpec, CliError> {
        if !(self.strength >= 0.0 && self.strength.is_finite()) {
            return Err(config::invalid(
                &format!("{section}.strength"),
                "must be finite and >= 0",
            ));
        }
        positive(&format!("{section}.beam_radius"), self.beam_radius)?;
        DriftSpec::radial(&self.profile(), 2).map_err(|e| config::in_section(section, e))
    }

    /// `sgn(0) = 0` makes the indicator of `r ≤ beam` exact.
    fn profile(&self) -> String {
        format!("-{}*r*(1 - sgn(max(r - {}, 0)))", self.strength, self.beam_radius)
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Noise {
    /// `0` gives deterministic paths.
    sigma: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Run {
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(rename = "T", default = "one")]
    horizon: f64,
    /// Exit radius.
    #[serde(rename = "R")]
    radius: f64,
    #[serde(default = "default_count")]
    n_trajectories: u64,
    #[serde(default = "origin")]
    x0: Vec<f64>,
}

fn default_dt() -> f64 {
    1e-3
}
fn one() -> f64 {
    1.0
}
fn default_count() -> u64 {
    4
}
fn origin() -> Vec<f64> {
    vec![0.0, 0.0]
}

pub struct TrapDemo;

impl Experiment for TrapDemo {
    fn name(&self) -> &'static str {
        "trap-demo"
    }

    fn about(&self) -> &'static str {
        "2-d trap with force vanishing outside the beam: sample trajectories, exit flags, containment"
    }

    fn default_output(&self) -> &'static str {
        "trap_demo.csv"
    }

    fn run(&self, text: &str, options: Options) -> Result<Outcome, CliError> {
        let mut cfg: Config = config::parse(text)?;
        if let Some(seed) = options.seed {
            cfg.seed = seed;
        }
        let trap = cfg.trap.validate("trap")?;
        let reference = cfg.reference.map(|r| r.validate("reference")).transpose()?;
        let noise = if cfg.noise.sigma == 0.0 {
            NoiseSpec::zero()
        } else {
            NoiseSpec::new(cfg.noise.sigma).map_err(|e| config::in_section("noise", e))?
        };
        let run = &cfg.run;
        positive("run.dt", run.dt)?;
        positive("run.T", run.horizon)?;
        positive("run.R", run.radius)?;
        at_least("run.n_trajectories", run.n_trajectories, 1)?;
        if run.x0.len() != 2 || run.x0.iter().any(|v| !v.is_finite()) {
            return Err(config::invalid("run.x0", "must be two finite numbers"));
        }
        let grid = TimeGrid::new(run.dt, run.horizon).map_err(|e| config::in_section("run", e))?;
        if let Some(mc) = &cfg.mc {
            mc.validate("mc")?;
        }

        let mut csv = Csv::new(self.name(), &cfg)?;
        csv.comment("trap_profile", cfg.trap.profile());
        csv.row(["path", "step", "t", "x1", "x2", "r", "exit"]);
        for i in 0..run.n_trajectories {
            let stream = RngStream::new(cfg.seed, i);
            let traj = integrate(&trap, noise, &PlainNoise, &run.x0, grid, stream)?;
            let exit = first_exit(&traj, run.radius, false, noise, stream).map(|e| e.step);
            for k in 0..traj.len() {
                let x = traj.state(k);
                csv.row([
                    i.to_string(),
                    k.to_string(),
                    traj.time(k).to_string(),
                    x[0].to_string(),
                    x[1].to_string(),
                    traj.norm_at(k).to_string(),
                    u8::from(exit == Some(k)).to_string(),
                ]);
            }
        }
        let mut artifacts = vec![Artifact {
            suffix: None,
            bytes: csv.into_bytes(),
        }];

        if let Some(mc) = &cfg.mc {
            let settings = mc.settings(cfg.seed);
            let estimate =
                |d: &DriftSpec| containment_probability(d, noise, &run.x0, run.radius, run.horizon, settings);
            let p_trap = estimate(&trap)?;
            let mut summary = Csv::new(self.name(), &cfg)?;
            summary.comment("seeds", "trap and reference share path streams");
            let mut rows: Vec<(&str, &Trap, ContainmentEstimate)> = vec![("trap", &cfg.trap, p_trap.clone())];
            if let (Some(r), Some(spec)) = (&cfg.reference, &reference) {
                let report = check_dominance(
                    &trap,
                    spec,
                    run.radius,
                    GridParams {
                        seed: cfg.seed,
                        ..GridParams::default()
                    },
                )?;
                let p_ref = estimate(spec)?;
                summary.comment("dominance", serde_json::to_string(&report).expect("report serializes"));
                summary.comment("p_trap_minus_p_reference", p_trap.p_hat - p_ref.p_hat);
                summary.comment("pooled_se", pooled_se(&p_trap, &p_ref));
                rows.push(("reference", r, p_ref));
            }
            summary.row([
                "drift",
                "strength",
                "beam_radius",
                "R",
                "T",
                "dt",
                "n_paths",
                "p_hat",
                "ci_low",
                "ci_high",
                "se",
            ]);
            for (name, t, e) in rows {
                summary.row([
                    name.to_string(),
                    t.strength.to_string(),
                    t.beam_radius.to_string(),
                    e.radius.to_string(),
                    e.horizon.to_string(),
                    e.dt.to_string(),
                    e.n_paths.to_string(),
                    e.p_hat.to_string(),
                    e.ci_low.to_string(),
                    e.ci_high.to_string(),
                    e.standard_error().to_string(),
                ]);
            }
            artifacts.push(Artifact {
                suffix: Some("containment.csv"),
                bytes: summary.into_bytes(),
            });
        }
        Ok(Outcome {
            artifacts,
            refusal: None,
        })
    }
}
