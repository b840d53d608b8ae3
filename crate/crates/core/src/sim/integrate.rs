use super::coupling::{NoiseCoupling, PlainNoise};
use super::rng::RngStream;
use super::trajectory::Trajectory;
use crate::drift::{DriftSpec, NoiseSpec};
use crate::error::{require_positive, Error, Result};

/// Uniform time grid `t_k = k dt`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// `floor(T/dt)` steps; the small tolerance keeps `T = n dt` from
    /// losing its last step to rounding.
    pub fn new(dt: f64, horizon: f64) -> Result<Self> {
        require_positive("dt", dt)?;
        require_positive("T", horizon)?;
        if dt > horizon {
            return Err(Error::invalid(
                "dt",
                format!("must not exceed T (dt = {dt}, T = {horizon})"),
            ));
        }
        Ok(Self {
            dt,
            steps: steps_within(dt, horizon),
        })
    }

    /// Like [`TimeGrid::new`], with the step capped at `0.5/λ_max` over the
    /// built-in drifts given. Explicit Euler on `-λx` blows up once `λ dt > 2`.
    pub fn guarded(dt: f64, horizon: f64, drifts: &[&DriftSpec]) -> Result<Self> {
        TimeGrid::new(dt, horizon)?;
        let cap = drifts
            .iter()
            .filter_map(|d| d.max_pull())
            .fold(f64::INFINITY, |c, l| c.min(0.5 / l));
        TimeGrid::new(dt.min(cap), horizon)
    }

    /// Number of steps of this grid that fit in `horizon`.
    pub fn steps_for(&self, horizon: f64) -> usize {
        steps_within(self.dt, horizon)
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

fn steps_within(dt: f64, horizon: f64) -> usize {
    (horizon / dt + 1e-9).floor() as usize
}

pub(crate) fn check_start(drift: &DriftSpec, x0: &[f64]) -> Result<()> {
    if x0.len() != drift.dimension() {
        return Err(Error::DimensionMismatch {
            expected: drift.dimension(),
            found: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 0 });
    }
    Ok(())
}

/// Euler–Maruyama path of `dX = f(X) dt + σ dB` with plain noise and the
/// stiffness guard applied.
pub fn euler_maruyama(
    drift: &DriftSpec,
    noise: NoiseSpec,
    x0: &[f64],
    dt: f64,
    horizon: f64,
    stream: RngStream,
) -> Result<Trajectory> {
    let grid = TimeGrid::guarded(dt, horizon, &[drift])?;
    integrate(drift, noise, &PlainNoise, x0, grid, stream)
}

/// Euler–Maruyama on an explicit grid with a state-dependent noise
/// transform: `X_{k+1} = X_k + f(X_k) dt + σ √dt · c(X_k, ξ_k)`.
pub fn integrate(
    drift: &DriftSpec,
    noise: NoiseSpec,
    coupling: &dyn NoiseCoupling,
    x0: &[f64],
    grid: TimeGrid,
    stream: RngStream,
) -> Result<Trajectory> {
    check_start(drift, x0)?;
    let d = x0.len();
    let dt = grid.dt;
    let scale = noise.sigma * dt.sqrt();
    let mut gauss = stream.gaussian();
    let mut traj = Trajectory::with_capacity(dt, d, grid.steps + 1);
    traj.push(x0);
    let mut x = x0.to_vec();
    let mut f = vec![0.0; d];
    let mut xi = vec![0.0; d];
    let mut b = vec![0.0; d];
    for k in 0..grid.steps {
        drift
            .eval_into(&x, &mut f)
            .map_err(|source| Error::PathEval { step: k, source })?;
        gauss.fill(&mut xi);
        coupling.transform(&x, &xi, &mut b);
        for i in 0..d {
            x[i] += f[i] * dt + scale * b[i];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: k + 1 });
        }
        traj.push(&x);
    }
    Ok(traj)
}
