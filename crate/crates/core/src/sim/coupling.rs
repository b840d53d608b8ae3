//! Noise transforms applied to a shared Gaussian increment.
//!
//! A coupling maps the raw increment `ΔB` to the increment seen by a process
//! in state `x`. All of them are orthogonal maps, so each process on its own
//! is driven by a Brownian motion; what changes is how two processes fed the
//! same `ΔB` move relative to each other.
//!
//! | name       | transform                               |
//! |------------|-----------------------------------------|
//! | `plain`    | `ΔB`                                    |
//! | `sign`     | `s(x) ΔB`, `s(x) = -1` for `x < 0`, else `+1` (1-d) |
//! | `rotation` | `R_xᵀ ΔB` (`R_x` maps `x/‖x‖` to `e₁`)   |
//!
//! The sign coupling uses `+1` at an exact zero: with `sgn(0) = 0` a path
//! started at the origin would never move.

use crate::drift::apply_rotation_transpose;

pub trait NoiseCoupling: Send + Sync {
    fn name(&self) -> &'static str;

    /// Writes the increment for a process in `state` into `out`.
    fn transform(&self, state: &[f64], increment: &[f64], out: &mut [f64]);

    /// True when `transform` is the identity, letting integrators skip it.
    fn is_identity(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PlainNoise;

impl NoiseCoupling for PlainNoise {
    fn name(&self) -> &'static str {
        "plain"
    }
    fn transform(&self, _state: &[f64], increment: &[f64], out: &mut [f64]) {
        out.copy_from_slice(increment);
    }
    fn is_identity(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SignCoupling;

impl NoiseCoupling for SignCoupling {
    fn name(&self) -> &'static str {
        "sign"
    }
    fn transform(&self, state: &[f64], increment: &[f64], out: &mut [f64]) {
        let s = if state[0] < 0.0 { -1.0 } else { 1.0 };
        for (o, b) in out.iter_mut().zip(increment) {
            *o = s * b;
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RotationCoupling;

impl NoiseCoupling for RotationCoupling {
    fn name(&self) -> &'static str {
        "rotation"
    }
    fn transform(&self, state: &[f64], increment: &[f64], out: &mut [f64]) {
        apply_rotation_transpose(state, increment, out);
    }
}

static COUPLINGS: [&dyn NoiseCoupling; 3] = [&PlainNoise, &SignCoupling, &RotationCoupling];

pub fn coupling_by_name(name: &str) -> Option<&'static dyn NoiseCoupling> {
    COUPLINGS.iter().copied().find(|c| c.name() == name)
}

pub fn coupling_names() -> impl Iterator<Item = &'static str> {
    COUPLINGS.iter().map(|c| c.name())
}
