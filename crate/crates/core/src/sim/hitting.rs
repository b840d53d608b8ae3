use super::trajectory::Trajectory;
use crate::error::{require_positive, Error, Result};

/// One strip excursion: the path sits at (or crosses) zero at step `tau` and
/// first reaches `|Y| ≥ ε` at step `upsilon`, if ever.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Excursion {
    pub tau: usize,
    pub upsilon: Option<usize>,
}

/// Alternating strip-exit / return-to-zero grid indices of a 1-d path.
///
/// `τ₀ = 0`; `υ_k` is the first index after `τ_k` with `|Y| ≥ ε`;
/// `τ_{k+1}` is the first index after `υ_k` where `Y` is zero or has the
/// opposite sign to `Y` at `υ_k`. The last excursion has `upsilon = None`
/// when the strip is not left again before the end of the path.
pub fn hitting_times(traj: &Trajectory, eps: f64) -> Result<Vec<Excursion>> {
    if traj.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: traj.dimension(),
        });
    }
    require_positive("epsilon", eps)?;
    let y = |k: usize| traj.state(k)[0];
    let n = traj.len();
    let mut out = Vec::new();
    let mut tau = 0;
    loop {
        let Some(up) = (tau + 1..n).find(|&k| y(k).abs() >= eps) else {
            out.push(Excursion { tau, upsilon: None });
            return Ok(out);
        };
        out.push(Excursion { tau, upsilon: Some(up) });
        let side = y(up).signum();
        match (up + 1..n).find(|&k| y(k) == 0.0 || y(k).signum() != side) {
            Some(next) => tau = next,
            None => return Ok(out),
        }
    }
}
