//! One sign-coupled pair `(X, Y)` with the strip hitting times of `Y`.

use serde::{Deserialize, Serialize};

use pullbound::dominance::{check_dominance, GridParams, Verdict};
use pullbound::sim::{hitting_times, simulate_coupled_1d};
use pullbound::{RngStream, Trajectory};

use super::Experiment;
use crate::artifact::Csv;
use crate::config::{self, drift, drift_table, positive};
use crate::{CliError, Options, Outcome};

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    path_index: u64,
    // Read by the binary before dispatch.
    #[allow(dead_code)]
    #[serde(default, skip_serializing)]
    output: Option<String>,
    /// Same as `--force`.
    #[serde(default)]
    force: bool,
    /// Dominated drift.
    f: toml::Table,
    /// Dominating drift.
    g: toml::Table,
    #[serde(default)]
    run: Run,
    #[serde(default)]
    dominance: Grid,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
struct Run {
    dt: f64,
    #[serde(rename = "T")]
    horizon: f64,
    #[serde(rename = "K")]
    check_radius: f64,
    epsilon: f64,
}

impl Default for Run {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 5.0,
            check_radius: 4.0,
            epsilon: 0.5,
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
struct Grid {
    n_grid: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            n_grid: GridParams::default().n_grid,
        }
    }
}

pub struct CouplingDemo;

impl Experiment for CouplingDemo {
    fn name(&self) -> &'static str {
        "coupling-demo"
    }

    fn about(&self) -> &'static str {
        "one sign-coupled pair with strip hitting times (refuses drifts that fail the dominance check)"
    }

    fn default_output(&self) -> &'static str {
        "coupling_demo.csv"
    }

    fn run(&self, text: &str, options: Options) -> Result<Outcome, CliError> {
        let mut cfg: Config = config::parse(text)?;
        if let Some(seed) = options.seed {
            cfg.seed = seed;
        }
        let f = drift("f", &cfg.f)?;
        let g = drift("g", &cfg.g)?;
        for (name, spec) in [("f", &f), ("g", &g)] {
            if spec.dimension() != 1 {
                return Err(config::invalid(name, "the coupling demo needs 1-d drifts"));
            }
        }
        let run = &cfg.run;
        positive("run.dt", run.dt)?;
        positive("run.T", run.horizon)?;
        positive("run.K", run.check_radius)?;
        positive("run.epsilon", run.epsilon)?;
        if run.dt > run.horizon {
            return Err(config::invalid("run.dt", "must not exceed T"));
        }
        if cfg.dominance.n_grid < 3 {
            return Err(config::invalid("dominance.n_grid", "must be at least 3"));
        }
        cfg.f = drift_table(&f);
        cfg.g = drift_table(&g);

        let grid = GridParams {
            n_grid: cfg.dominance.n_grid,
            ..GridParams::default()
        };
        let report = check_dominance(&f, &g, run.check_radius, grid)?;
        if report.verdict == Verdict::Violated && !(options.force || cfg.force) {
            let w = &report.witnesses[0];
            return Err(CliError::Refused(format!(
                "f does not symmetrically dominate g on [-{k}, {k}]: margin {}, witness x = {:?}",
                report.margin,
                w.point,
                k = run.check_radius
            )));
        }

        let pair = simulate_coupled_1d(
            &f,
            &g,
            run.dt,
            run.horizon,
            run.check_radius,
            RngStream::new(cfg.seed, cfg.path_index),
        )?;
        // The comparison only holds up to the discrete T_K; hitting times
        // are read off that prefix.
        let end = pair.comparison_end();
        let prefix = truncate(&pair.y, end);
        let excursions = hitting_times(&prefix, run.epsilon)?;

        let mut csv = Csv::new(self.name(), &cfg)?;
        csv.comment("dominance", serde_json::to_string(&report).expect("report serializes"));
        csv.comment(
            "t_k",
            pair.t_k().map(|t| t.to_string()).unwrap_or_else(|| "none".into()),
        );
        csv.comment("max_violation", pair.max_violation());
        csv.comment("tolerance", 10.0 * pair.x.dt().sqrt());
        csv.row(["step", "t", "x", "y", "tau", "upsilon"]);
        let mut tau = vec![None; pair.x.len()];
        let mut upsilon = vec![None; pair.x.len()];
        for (k, e) in excursions.iter().enumerate() {
            tau[e.tau] = Some(k);
            if let Some(u) = e.upsilon {
                upsilon[u] = Some(k);
            }
        }
        let mark = |m: Option<usize>| m.map(|k| k.to_string()).unwrap_or_default();
        for step in 0..pair.x.len() {
            csv.row([
                step.to_string(),
                pair.x.time(step).to_string(),
                pair.x.state(step)[0].to_string(),
                pair.y.state(step)[0].to_string(),
                mark(tau[step]),
                mark(upsilon[step]),
            ]);
        }
        Ok(Outcome::single(csv.into_bytes()))
    }
}

fn truncate(traj: &Trajectory, last: usize) -> Trajectory {
    let states: Vec<Vec<f64>> = traj.states().take(last + 1).map(<[f64]>::to_vec).collect();
    Trajectory::from_states(traj.dt(), &states)
}
