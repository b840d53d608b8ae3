use serde::Serialize;

use super::interval::{wilson_interval, Z95};
use super::ContainmentEstimate;
use crate::error::{Error, Result};
use crate::rate::{RateEstimate, RateMethodKind};

/// One horizon of a decay fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitPoint {
    pub horizon: f64,
    pub p_hat: f64,
    pub n_paths: u64,
}

impl From<&ContainmentEstimate> for FitPoint {
    fn from(e: &ContainmentEstimate) -> Self {
        Self {
            horizon: e.horizon,
            p_hat: e.p_hat,
            n_paths: e.n_paths,
        }
    }
}

/// Weighted least-squares slope of `-ln p̂` against `T`, with an intercept
/// absorbing any constant prefactor. Weights are inverse delta-method
/// variances `(1-p)/(np)`, floored at `1/(2n²p)` so that `p̂ = 1` points
/// keep a finite weight.
///
/// If some `p̂ = 0` no fit is made; the result is the lower bound
/// `max_T -ln(ci_high)/T` with `lower_bound` set.
pub fn fit_rate(points: &[FitPoint]) -> Result<RateEstimate> {
    if points.len() < 2 {
        return Err(Error::invalid("horizons", "at least two horizons are required"));
    }
    for p in points {
        if !(p.horizon > 0.0 && p.horizon.is_finite()) {
            return Err(Error::invalid(
                "horizons",
                format!("must be positive, got {}", p.horizon),
            ));
        }
        if !(0.0..=1.0).contains(&p.p_hat) || p.n_paths == 0 {
            return Err(Error::invalid("p_hat", "must lie in [0, 1] with n_paths >= 1"));
        }
    }
    let distinct = points.iter().any(|p| p.horizon != points[0].horizon);
    if !distinct {
        return Err(Error::invalid(
            "horizons",
            "at least two distinct horizons are required",
        ));
    }

    if points.iter().any(|p| p.p_hat == 0.0) {
        let mu = points
            .iter()
            .map(|p| {
                let (_, hi) = wilson_interval((p.p_hat * p.n_paths as f64).round() as u64, p.n_paths, Z95);
                -hi.ln() / p.horizon
            })
            .fold(0.0, f64::max);
        return Ok(RateEstimate {
            mu,
            method: RateMethodKind::McFit,
            stderr: None,
            lower_bound: true,
        });
    }

    let mut sw = 0.0;
    let mut st = 0.0;
    let mut sy = 0.0;
    let obs: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| {
            let n = p.n_paths as f64;
            let var = (1.0 - p.p_hat).max(1.0 / (2.0 * n)) / (n * p.p_hat);
            let w = 1.0 / var;
            let y = -p.p_hat.ln();
            sw += w;
            st += w * p.horizon;
            sy += w * y;
            (p.horizon, y, w)
        })
        .collect();
    let (tbar, ybar) = (st / sw, sy / sw);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (t, y, w) in obs {
        sxx += w * (t - tbar) * (t - tbar);
        sxy += w * (t - tbar) * (y - ybar);
    }
    Ok(RateEstimate {
        mu: (sxy / sxx).max(0.0),
        method: RateMethodKind::McFit,
        stderr: Some((1.0 / sxx).sqrt()),
        lower_bound: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(f: impl Fn(f64) -> f64) -> Vec<FitPoint> {
        [5.0, 10.0, 15.0]
            .iter()
            .map(|&t| FitPoint {
                horizon: t,
                p_hat: f(t),
                n_paths: 100_000,
            })
            .collect()
    }

    #[test]
    fn exact_exponential() {
        let r = fit_rate(&pts(|t| (-0.5 * t).exp())).unwrap();
        assert!((r.mu - 0.5).abs() < 1e-12);
        assert!(!r.lower_bound);
    }

    #[test]
    fn prefactor_cancels() {
        let r = fit_rate(&pts(|t| 0.8 * (-0.1 * t).exp())).unwrap();
        assert!((r.mu - 0.1).abs() < 1e-12);
    }

    #[test]
    fn no_decay() {
        let r = fit_rate(&pts(|_| 1.0)).unwrap();
        assert_eq!(r.mu, 0.0);
        assert!(r.stderr.unwrap() > 0.0);
    }

    #[test]
    fn empty_count_gives_lower_bound() {
        let r = fit_rate(&pts(|t| if t > 12.0 { 0.0 } else { 0.5 })).unwrap();
        assert!(r.lower_bound);
        assert!(r.stderr.is_none());
        let (_, hi_empty) = wilson_interval(0, 100_000, Z95);
        let (_, hi_half) = wilson_interval(50_000, 100_000, Z95);
        let want = (-hi_empty.ln() / 15.0).max(-hi_half.ln() / 5.0);
        assert!((r.mu - want).abs() < 1e-12);
    }

    #[test]
    fn rejects_single_horizon() {
        assert!(fit_rate(&pts(|_| 0.5)[..1]).is_err());
    }
}
