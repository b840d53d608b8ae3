//! First exit from the ball `‖x‖ ≤ R`.
//!
//! Grid detection declares an exit at the first `t_k` with `‖X_k‖ > R`.
//! In 1-d the Brownian-bridge correction also declares an exit between two
//! inside points `a = X_k`, `b = X_{k+1}` with probability
//!
//! ```text
//! p = 1 - (1 - p₊)(1 - p₋),  p₊ = exp(-2(R-a)(R-b)/(σ²dt)),  p₋ = exp(-2(R+a)(R+b)/(σ²dt))
//! ```
//!
//! (each barrier treated independently), compared against one uniform draw
//! per step, timestamped `t_{k+1}`. The uniform stream is separate from the
//! Gaussian one, so switching the correction on does not change the path.

use super::coupling::NoiseCoupling;
use super::integrate::{check_start, TimeGrid};
use super::rng::RngStream;
use super::trajectory::{ExitEvent, Trajectory};
use crate::drift::{norm, DriftSpec, NoiseSpec};
use crate::error::{require_positive, Error, Result};

/// Beyond this exponent `e^{-x}` is below 2⁻⁵³, the smallest uniform draw,
/// so skipping the exponential cannot change a decision.
const NEGLIGIBLE_EXPONENT: f64 = 37.0;

/// Probability that a Brownian bridge from `a` to `b` over a step with
/// variance `σ²dt` leaves `[-R, R]`. Both endpoints are assumed inside.
#[inline]
pub fn bridge_exit_probability(a: f64, b: f64, radius: f64, variance: f64) -> f64 {
    if variance <= 0.0 {
        return 0.0;
    }
    let barrier = |e: f64| if e > NEGLIGIBLE_EXPONENT { 0.0 } else { (-e).exp() };
    let up = barrier(2.0 * (radius - a) * (radius - b) / variance);
    let down = barrier(2.0 * (radius + a) * (radius + b) / variance);
    up + down - up * down
}

/// First exit of a stored trajectory. The bridge correction only applies in
/// 1-d and draws its uniforms from `stream`.
pub fn first_exit(
    traj: &Trajectory,
    radius: f64,
    bridge_correction: bool,
    noise: NoiseSpec,
    stream: RngStream,
) -> Option<ExitEvent> {
    let bridge = bridge_correction && traj.dimension() == 1;
    let variance = noise.sigma * noise.sigma * traj.dt();
    let mut uniforms = stream.uniforms();
    let event = |step, bridge| ExitEvent {
        step,
        time: traj.time(step),
        bridge,
    };
    if traj.norm_at(0) > radius {
        return Some(event(0, false));
    }
    for k in 0..traj.len() - 1 {
        let u = if bridge { uniforms.next() } else { 1.0 };
        if traj.norm_at(k + 1) > radius {
            return Some(event(k + 1, false));
        }
        if bridge {
            let p = bridge_exit_probability(traj.state(k)[0], traj.state(k + 1)[0], radius, variance);
            if u < p {
                return Some(event(k + 1, true));
            }
        }
    }
    None
}

/// Exit steps of one simulated path against several radii.
#[derive(Debug, Clone, PartialEq)]
pub struct PathExits {
    /// Per radius (ascending): first exit step, bridge-corrected when enabled.
    pub corrected: Vec<Option<usize>>,
    /// Per radius: first step with `‖X_k‖ > R`.
    pub raw: Vec<Option<usize>>,
    /// Step at which the path was aborted (non-finite state or drift
    /// evaluation failure). Radii not yet left count as exited there.
    pub failed: Option<usize>,
}

impl PathExits {
    /// Contained up to `steps` under radius index `i`.
    pub fn contained(&self, i: usize, steps: usize, corrected: bool) -> bool {
        let exit = if corrected { self.corrected[i] } else { self.raw[i] };
        exit.is_none_or(|s| s > steps)
    }
}

/// Runs paths of `dX = f(X) dt + σ c(X, dB)` from a fixed start, recording
/// only exit steps. Equivalent to [`super::integrate`] followed by
/// [`first_exit`] per radius, without storing the path, and stopping as soon
/// as every radius has been left on the grid.
pub struct ExitSimulator<'a> {
    drift: &'a DriftSpec,
    noise: NoiseSpec,
    coupling: &'a dyn NoiseCoupling,
    x0: Vec<f64>,
    grid: TimeGrid,
    radii: Vec<f64>,
    bridge: bool,
}

impl<'a> ExitSimulator<'a> {
    /// `radii` must be positive and ascending. The correction is silently
    /// off for d ≥ 2.
    pub fn new(
        drift: &'a DriftSpec,
        noise: NoiseSpec,
        coupling: &'a dyn NoiseCoupling,
        x0: &[f64],
        grid: TimeGrid,
        radii: &[f64],
        bridge_correction: bool,
    ) -> Result<Self> {
        check_start(drift, x0)?;
        if radii.is_empty() {
            return Err(Error::invalid("R", "at least one radius is required"));
        }
        for r in radii {
            require_positive("R", *r)?;
        }
        if radii.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("R", "radii must be ascending"));
        }
        Ok(Self {
            drift,
            noise,
            coupling,
            x0: x0.to_vec(),
            grid,
            radii: radii.to_vec(),
            bridge: bridge_correction && drift.dimension() == 1,
        })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn bridge(&self) -> bool {
        self.bridge
    }

    pub fn run(&self, stream: RngStream) -> PathExits {
        let m = self.radii.len();
        let mut out = PathExits {
            corrected: vec![None; m],
            raw: vec![None; m],
            failed: None,
        };
        let mut tracker = Tracker {
            radii: &self.radii,
            out: &mut out,
            raw_left: 0,
            corrected_left: 0,
        };
        tracker.grid(norm(&self.x0), 0);
        if self.drift.dimension() == 1 {
            self.run_scalar(stream, &mut tracker);
        } else {
            self.run_vector(stream, &mut tracker);
        }
        out
    }

    fn run_scalar(&self, stream: RngStream, tracker: &mut Tracker<'_>) {
        let dt = self.grid.dt;
        let scale = self.noise.sigma * dt.sqrt();
        let variance = self.noise.sigma * self.noise.sigma * dt;
        let plain = self.coupling.is_identity();
        let mut gauss = stream.gaussian();
        let mut uniforms = stream.uniforms();
        let mut x = self.x0[0];
        let mut b = [0.0];
        for k in 0..self.grid.steps {
            if tracker.all_left() {
                break;
            }
            let fx = match self.drift.eval_scalar(x) {
                Ok(v) => v,
                Err(_) => return tracker.fail(k),
            };
            let xi = gauss.next();
            let inc = if plain {
                xi
            } else {
                self.coupling.transform(&[x], &[xi], &mut b);
                b[0]
            };
            let next = x + fx * dt + scale * inc;
            if !next.is_finite() {
                return tracker.fail(k + 1);
            }
            let u = if self.bridge { uniforms.next() } else { 1.0 };
            tracker.grid(next.abs(), k + 1);
            if self.bridge {
                tracker.bridge(|r| u < bridge_exit_probability(x, next, r, variance), k + 1);
            }
            x = next;
        }
    }

    fn run_vector(&self, stream: RngStream, tracker: &mut Tracker<'_>) {
        let d = self.x0.len();
        let dt = self.grid.dt;
        let scale = self.noise.sigma * dt.sqrt();
        let mut gauss = stream.gaussian();
        let mut x = self.x0.clone();
        let (mut f, mut xi, mut b) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
        for k in 0..self.grid.steps {
            if tracker.all_left() {
                break;
            }
            if self.drift.eval_into(&x, &mut f).is_err() {
                return tracker.fail(k);
            }
            gauss.fill(&mut xi);
            self.coupling.transform(&x, &xi, &mut b);
            for i in 0..d {
                x[i] += f[i] * dt + scale * b[i];
            }
            if x.iter().any(|v| !v.is_finite()) {
                return tracker.fail(k + 1);
            }
            tracker.grid(norm(&x), k + 1);
        }
    }
}

/// Exits against ascending radii form a prefix: leaving a ball means having
/// left every smaller one. Both counters index the first radius not yet left.
struct Tracker<'a> {
    radii: &'a [f64],
    out: &'a mut PathExits,
    raw_left: usize,
    corrected_left: usize,
}

impl Tracker<'_> {
    #[inline]
    fn all_left(&self) -> bool {
        self.raw_left == self.radii.len()
    }

    #[inline]
    fn grid(&mut self, r: f64, step: usize) {
        while self.raw_left < self.radii.len() && r > self.radii[self.raw_left] {
            self.out.raw[self.raw_left] = Some(step);
            self.raw_left += 1;
        }
        while self.corrected_left < self.raw_left {
            self.out.corrected[self.corrected_left] = Some(step);
            self.corrected_left += 1;
        }
    }

    /// The crossing probability decreases in R, so with a shared uniform the
    /// first radius that survives ends the scan.
    #[inline]
    fn bridge(&mut self, mut exits: impl FnMut(f64) -> bool, step: usize) {
        while self.corrected_left < self.radii.len() && exits(self.radii[self.corrected_left]) {
            self.out.corrected[self.corrected_left] = Some(step);
            self.corrected_left += 1;
        }
    }

    fn fail(&mut self, step: usize) {
        self.out.failed = Some(step);
        self.grid(f64::INFINITY, step);
    }
}
