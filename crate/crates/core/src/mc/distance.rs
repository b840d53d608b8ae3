//! Containment of the gap between two copies of one system.

use rayon::prelude::*;

use super::interval::{wilson_interval, Z95};
use super::{ContainmentEstimate, McSettings};
use crate::drift::{norm, DriftSpec, NoiseSpec};
use crate::error::{require_positive, Error, Result};
use crate::sim::{bridge_exit_probability, RngStream, TimeGrid};

const SECOND_COPY_TAG: u64 = 0x636F_7079;

#[derive(Default, Clone, Copy)]
struct Tally {
    contained: u64,
    contained_raw: u64,
    failed: u64,
}

/// Estimates `P(sup_{t≤T} ‖Y_t - X_t‖ ≤ R)` for two solutions of
/// `dX = f(X) dt + σ dB` started together at `x0` and driven by independent
/// Brownian motions. In 1-d the bridge correction treats `Y - X` as having
/// step variance `2σ²dt`. Paths whose state overflows count as exits.
pub fn distance_containment(
    drift: &DriftSpec,
    noise: NoiseSpec,
    x0: &[f64],
    radius: f64,
    horizon: f64,
    settings: McSettings,
) -> Result<ContainmentEstimate> {
    settings.validate()?;
    require_positive("R", radius)?;
    let d = drift.dimension();
    if x0.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x0.len(),
        });
    }
    let grid = TimeGrid::guarded(settings.dt, horizon, &[drift])?;
    let bridge = settings.bridge_correction && d == 1;
    let variance = 2.0 * noise.sigma * noise.sigma * grid.dt;
    let scale = noise.sigma * grid.dt.sqrt();

    let run = |i: u64| -> (bool, bool, bool) {
        let stream = RngStream::new(settings.master_seed, i);
        let mut gx = stream.gaussian();
        let mut gy = stream.fork(SECOND_COPY_TAG).gaussian();
        let mut uniforms = stream.uniforms();
        let (mut x, mut y) = (x0.to_vec(), x0.to_vec());
        let (mut fx, mut fy) = (vec![0.0; d], vec![0.0; d]);
        let mut z = vec![0.0; d];
        // A bridge exit only ends the corrected count; the raw count needs the
        // rest of the path.
        let mut inside = true;
        for _ in 0..grid.steps {
            if drift.eval_into(&x, &mut fx).is_err() || drift.eval_into(&y, &mut fy).is_err() {
                return (false, false, true);
            }
            let z_prev = y[0] - x[0];
            for i in 0..d {
                x[i] += fx[i] * grid.dt + scale * gx.next();
                y[i] += fy[i] * grid.dt + scale * gy.next();
                z[i] = y[i] - x[i];
            }
            if !z.iter().all(|v| v.is_finite()) {
                return (false, false, true);
            }
            let u = if bridge { uniforms.next() } else { 1.0 };
            if norm(&z) > radius {
                return (false, false, false);
            }
            if inside && bridge && u < bridge_exit_probability(z_prev, z[0], radius, variance) {
                inside = false;
            }
        }
        (inside, true, false)
    };

    let t = (0..settings.n_paths)
        .into_par_iter()
        .fold(Tally::default, |mut t, i| {
            let (c, c_raw, failed) = run(i);
            t.contained += u64::from(c);
            t.contained_raw += u64::from(c_raw);
            t.failed += u64::from(failed);
            t
        })
        .reduce(Tally::default, |a, b| Tally {
            contained: a.contained + b.contained,
            contained_raw: a.contained_raw + b.contained_raw,
            failed: a.failed + b.failed,
        });

    let n = settings.n_paths;
    let (ci_low, ci_high) = wilson_interval(t.contained, n, Z95);
    Ok(ContainmentEstimate {
        drift: drift.clone(),
        noise,
        radius,
        horizon,
        dt: grid.dt,
        n_paths: n,
        seed: settings.master_seed,
        n_contained: t.contained,
        p_hat: t.contained as f64 / n as f64,
        ci_low,
        ci_high,
        n_overflow: t.failed,
        bridge_corrected: bridge,
        n_contained_raw: t.contained_raw,
        p_hat_raw: t.contained_raw as f64 / n as f64,
    })
}
