//! Monte Carlo containment probabilities and decay-rate fits.
//!
//! Paths are spread over the current rayon pool. Each path owns the stream
//! `(master_seed, path_index)` and the per-path outcomes are summed as
//! integers, so every estimate is bit-identical for any number of workers.

mod distance;
pub mod fit;
pub mod interval;

use rayon::prelude::*;
use serde::Serialize;

use crate::drift::{DriftSpec, NoiseSpec};
use crate::error::{require_positive, Error, Result};
use crate::rate::{RateEstimate, RateMethod, RateMethodKind};
use crate::sim::{fork_seed, ExitSimulator, NoiseCoupling, PathExits, PlainNoise, RngStream, TimeGrid};

pub use distance::distance_containment;
pub use fit::{fit_rate, FitPoint};
pub use interval::{binomial_se, wilson_interval, Z95, Z99};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSettings {
    pub n_paths: u64,
    /// Requested step; the stiffness guard may shrink it.
    pub dt: f64,
    pub master_seed: u64,
    /// Brownian-bridge exit correction (1-d only).
    pub bridge_correction: bool,
}

impl McSettings {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::invalid("n_paths", "must be at least 1"));
        }
        require_positive("dt", self.dt)
    }
}

/// One containment probability estimate. Serializes to the flat JSON record
/// used by the CLI artifacts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentEstimate {
    pub drift: DriftSpec,
    pub noise: NoiseSpec,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Step actually used.
    pub dt: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub n_contained: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Paths aborted on a non-finite state or a drift evaluation failure;
    /// they count as exits.
    pub n_overflow: u64,
    pub bridge_corrected: bool,
    /// Grid-only detection, for auditing the correction.
    pub n_contained_raw: u64,
    pub p_hat_raw: f64,
}

impl ContainmentEstimate {
    pub fn standard_error(&self) -> f64 {
        binomial_se(self.p_hat, self.n_paths)
    }

    pub fn interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.n_contained, self.n_paths, z)
    }
}

/// `√(se_a² + se_b²)`.
pub fn pooled_se(a: &ContainmentEstimate, b: &ContainmentEstimate) -> f64 {
    a.standard_error().hypot(b.standard_error())
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Counts {
    /// `[radius][horizon]`, flattened.
    contained: Vec<u64>,
    contained_raw: Vec<u64>,
    failed: u64,
}

impl Counts {
    fn zero(cells: usize) -> Self {
        Self {
            contained: vec![0; cells],
            contained_raw: vec![0; cells],
            failed: 0,
        }
    }

    fn record(mut self, exits: &PathExits, steps: &[usize]) -> Self {
        let h = steps.len();
        for i in 0..exits.raw.len() {
            for (j, &s) in steps.iter().enumerate() {
                self.contained[i * h + j] += u64::from(exits.contained(i, s, true));
                self.contained_raw[i * h + j] += u64::from(exits.contained(i, s, false));
            }
        }
        self.failed += u64::from(exits.failed.is_some());
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.contained.iter_mut().zip(&other.contained) {
            *a += b;
        }
        for (a, b) in self.contained_raw.iter_mut().zip(&other.contained_raw) {
            *a += b;
        }
        self.failed += other.failed;
        self
    }
}

/// Containment estimates on a common set of paths for every combination of
/// radius and horizon, indexed `[radius][horizon]` in the order given.
/// Sharing paths makes the estimates monotone in both `R` and `T`.
pub fn containment_profile(
    drift: &DriftSpec,
    noise: NoiseSpec,
    x0: &[f64],
    radii: &[f64],
    horizons: &[f64],
    settings: McSettings,
) -> Result<Vec<Vec<ContainmentEstimate>>> {
    containment_profile_with(drift, noise, &PlainNoise, x0, radii, horizons, settings)
}

/// [`containment_profile`] with an explicit noise transform.
pub fn containment_profile_with(
    drift: &DriftSpec,
    noise: NoiseSpec,
    coupling: &dyn NoiseCoupling,
    x0: &[f64],
    radii: &[f64],
    horizons: &[f64],
    settings: McSettings,
) -> Result<Vec<Vec<ContainmentEstimate>>> {
    settings.validate()?;
    if horizons.is_empty() {
        return Err(Error::invalid("T", "at least one horizon is required"));
    }
    for t in horizons {
        require_positive("T", *t)?;
    }
    let t_max = horizons.iter().copied().fold(0.0, f64::max);
    let grid = TimeGrid::guarded(settings.dt, t_max, &[drift])?;
    let steps: Vec<usize> = horizons.iter().map(|&t| grid.steps_for(t)).collect();

    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| radii[i]).collect();
    let sim = ExitSimulator::new(drift, noise, coupling, x0, grid, &sorted, settings.bridge_correction)?;

    let cells = radii.len() * horizons.len();
    let seed = settings.master_seed;
    let counts = (0..settings.n_paths)
        .into_par_iter()
        .fold(
            || Counts::zero(cells),
            |c, i| c.record(&sim.run(RngStream::new(seed, i)), &steps),
        )
        .reduce(|| Counts::zero(cells), Counts::merge);

    let n = settings.n_paths;
    let h = horizons.len();
    let mut out = vec![Vec::with_capacity(h); radii.len()];
    for (sorted_i, &orig_i) in order.iter().enumerate() {
        for (j, &t) in horizons.iter().enumerate() {
            let c = counts.contained[sorted_i * h + j];
            let c_raw = counts.contained_raw[sorted_i * h + j];
            let (ci_low, ci_high) = wilson_interval(c, n, Z95);
            out[orig_i].push(ContainmentEstimate {
                drift: drift.clone(),
                noise,
                radius: radii[orig_i],
                horizon: t,
                dt: grid.dt,
                n_paths: n,
                seed,
                n_contained: c,
                p_hat: c as f64 / n as f64,
                ci_low,
                ci_high,
                n_overflow: counts.failed,
                bridge_corrected: sim.bridge(),
                n_contained_raw: c_raw,
                p_hat_raw: c_raw as f64 / n as f64,
            });
        }
    }
    Ok(out)
}

/// `P(sup_{t≤T} ‖X_t‖ ≤ R)` for `X₀ = x0`.
pub fn containment_probability(
    drift: &DriftSpec,
    noise: NoiseSpec,
    x0: &[f64],
    radius: f64,
    horizon: f64,
    settings: McSettings,
) -> Result<ContainmentEstimate> {
    let mut p = containment_profile(drift, noise, x0, &[radius], &[horizon], settings)?;
    Ok(p.remove(0).remove(0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: RateEstimate,
    pub estimates: Vec<ContainmentEstimate>,
}

/// Fits the containment decay rate from independent path sets, one per
/// horizon (horizon `i` uses master seed `fork_seed(master_seed, i)`).
pub fn fit_decay_rate(
    drift: &DriftSpec,
    noise: NoiseSpec,
    x0: &[f64],
    radius: f64,
    horizons: &[f64],
    settings: McSettings,
) -> Result<DecayFit> {
    if horizons.len() < 2 {
        return Err(Error::invalid("horizons", "at least two horizons are required"));
    }
    if let Some(t) = horizons.iter().find(|t| !(**t >= 1.0 && t.is_finite())) {
        return Err(Error::invalid(
            "horizons",
            format!("each horizon must be >= 1, got {t}"),
        ));
    }
    let estimates = horizons
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let s = McSettings {
                master_seed: fork_seed(settings.master_seed, i as u64),
                ..settings
            };
            containment_probability(drift, noise, x0, radius, t, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<FitPoint> = estimates.iter().map(FitPoint::from).collect();
    Ok(DecayFit {
        rate: fit_rate(&points)?,
        estimates,
    })
}

/// Monte Carlo decay rate of the normalized OU process
/// `dX = -X dt + √2 dB`, `X₀ = 0`, as a [`RateMethod`].
#[derive(Debug, Clone)]
pub struct McFitMethod {
    pub settings: McSettings,
    pub horizons: Vec<f64>,
}

impl RateMethod for McFitMethod {
    fn kind(&self) -> RateMethodKind {
        RateMethodKind::McFit
    }
    fn rate(&self, radius: f64) -> Result<RateEstimate> {
        let ou = DriftSpec::ou(1.0, 1)?;
        let noise = NoiseSpec::new(std::f64::consts::SQRT_2)?;
        Ok(fit_decay_rate(&ou, noise, &[0.0], radius, &self.horizons, self.settings)?.rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub estimate: ContainmentEstimate,
}

/// Containment of `dX = f_λ(X) dt + dB`, `X₀ = 0`, with `f_λ(x) = -λx` for
/// `x < 0` and `-x` for `x > 0`. Every λ reuses the same master seed, so
/// path `i` sees the same Gaussian increments at every λ.
pub fn counterexample_sweep(
    lambdas: &[f64],
    radius: f64,
    horizon: f64,
    settings: McSettings,
) -> Result<Vec<SweepPoint>> {
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda", "at least one value is required"));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l >= 1.0 && l.is_finite())) {
        return Err(Error::invalid("lambda", format!("each value must be >= 1, got {l}")));
    }
    let noise = NoiseSpec::new(1.0)?;
    lambdas
        .iter()
        .map(|&lambda| {
            let drift = DriftSpec::piecewise(lambda, 1.0)?;
            Ok(SweepPoint {
                lambda,
                estimate: containment_probability(&drift, noise, &[0.0], radius, horizon, settings)?,
            })
        })
        .collect()
}

/// Tag for the reference run's seed, so it is independent of the sweep.
const REFLECTED_SEED_TAG: u64 = 0x7265_666C;

/// Containment of the reflected process `|X|`, `X` the symmetric OU(1)
/// process with unit noise: the large-λ limit of the sweep. `sup |X|` and
/// `sup ‖X‖` coincide, so this is the OU(1) containment on an independent
/// path set.
pub fn reflected_reference(radius: f64, horizon: f64, settings: McSettings) -> Result<ContainmentEstimate> {
    let s = McSettings {
        master_seed: fork_seed(settings.master_seed, REFLECTED_SEED_TAG),
        ..settings
    };
    containment_probability(
        &DriftSpec::ou(1.0, 1)?,
        NoiseSpec::new(1.0)?,
        &[0.0],
        radius,
        horizon,
        s,
    )
}
