use super::coupling::{NoiseCoupling, RotationCoupling, SignCoupling};
use super::integrate::{check_start, TimeGrid};
use super::rng::RngStream;
use super::trajectory::Trajectory;
use crate::drift::{norm, DriftSpec};
use crate::error::{require_positive, Error, Result};

/// Two processes driven by one Gaussian stream. `x` has drift `f` (the
/// dominated process), `y` has drift `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPair {
    pub x: Trajectory,
    pub y: Trajectory,
    pub stream: RngStream,
    /// First grid index with `‖Y_k‖ ≥ K`.
    pub t_k_step: Option<usize>,
    /// Transformed increments fed to `x` and `y`, `steps × d`, row-major.
    pub noise_x: Vec<f64>,
    pub noise_y: Vec<f64>,
}

impl CoupledPair {
    pub fn t_k(&self) -> Option<f64> {
        self.t_k_step.map(|k| self.y.time(k))
    }

    /// Last grid index at which the comparison `‖X‖ ≤ ‖Y‖` is claimed: the
    /// discrete `T_K`, or the end of the path.
    pub fn comparison_end(&self) -> usize {
        self.t_k_step.unwrap_or(self.y.len() - 1)
    }

    /// `max_k (‖X_k‖ - ‖Y_k‖)` over `k ≤ comparison_end()`.
    pub fn max_violation(&self) -> f64 {
        (0..=self.comparison_end())
            .map(|k| self.x.norm_at(k) - self.y.norm_at(k))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Increments applied at step `k` (from `t_k` to `t_{k+1}`).
    pub fn increments(&self, k: usize) -> (&[f64], &[f64]) {
        let d = self.x.dimension();
        (&self.noise_x[k * d..(k + 1) * d], &self.noise_y[k * d..(k + 1) * d])
    }
}

/// Simulates `dX = f(X) dt + c(X, dB)`, `dY = g(Y) dt + c(Y, dB)` from the
/// origin with unit noise, where `c` is the coupling's transform.
pub fn simulate_coupled(
    f: &DriftSpec,
    g: &DriftSpec,
    coupling: &dyn NoiseCoupling,
    dt: f64,
    horizon: f64,
    check_radius: f64,
    stream: RngStream,
) -> Result<CoupledPair> {
    if f.dimension() != g.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            found: g.dimension(),
        });
    }
    require_positive("K", check_radius)?;
    let d = f.dimension();
    let origin = vec![0.0; d];
    check_start(f, &origin)?;
    let grid = TimeGrid::guarded(dt, horizon, &[f, g])?;
    let dt = grid.dt;
    let sq = dt.sqrt();

    let mut gauss = stream.gaussian();
    let mut tx = Trajectory::with_capacity(dt, d, grid.steps + 1);
    let mut ty = Trajectory::with_capacity(dt, d, grid.steps + 1);
    let mut noise_x = Vec::with_capacity(grid.steps * d);
    let mut noise_y = Vec::with_capacity(grid.steps * d);
    tx.push(&origin);
    ty.push(&origin);
    let (mut x, mut y) = (origin.clone(), origin);
    let (mut fx, mut gy) = (vec![0.0; d], vec![0.0; d]);
    let (mut xi, mut bx, mut by) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut t_k_step = (norm(&y) >= check_radius).then_some(0);

    for k in 0..grid.steps {
        let fail = |source| Error::PathEval { step: k, source };
        f.eval_into(&x, &mut fx).map_err(fail)?;
        g.eval_into(&y, &mut gy).map_err(fail)?;
        gauss.fill(&mut xi);
        coupling.transform(&x, &xi, &mut bx);
        coupling.transform(&y, &xi, &mut by);
        for i in 0..d {
            x[i] += fx[i] * dt + sq * bx[i];
            y[i] += gy[i] * dt + sq * by[i];
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: k + 1 });
        }
        noise_x.extend_from_slice(&bx);
        noise_y.extend_from_slice(&by);
        tx.push(&x);
        ty.push(&y);
        if t_k_step.is_none() && norm(&y) >= check_radius {
            t_k_step = Some(k + 1);
        }
    }

    Ok(CoupledPair {
        x: tx,
        y: ty,
        stream,
        t_k_step,
        noise_x,
        noise_y,
    })
}

/// 1-d pair under the sign coupling `dB ↦ s(X) dB`.
pub fn simulate_coupled_1d(
    f: &DriftSpec,
    g: &DriftSpec,
    dt: f64,
    horizon: f64,
    check_radius: f64,
    stream: RngStream,
) -> Result<CoupledPair> {
    for spec in [f, g] {
        if spec.dimension() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: spec.dimension(),
            });
        }
    }
    simulate_coupled(f, g, &SignCoupling, dt, horizon, check_radius, stream)
}

/// d ≥ 2 pair under the rotation coupling `dB ↦ R_Xᵀ dB`.
pub fn simulate_coupled_nd(
    f: &DriftSpec,
    g: &DriftSpec,
    dt: f64,
    horizon: f64,
    check_radius: f64,
    stream: RngStream,
) -> Result<CoupledPair> {
    if f.dimension() < 2 {
        return Err(Error::invalid("dimension", "the rotation coupling needs d ≥ 2"));
    }
    simulate_coupled(f, g, &RotationCoupling, dt, horizon, check_radius, stream)
}
