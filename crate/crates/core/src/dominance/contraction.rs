//! Contraction rates and the bound they imply on the distance between two
//! copies of a system.
//!
//! If the symmetric part of `∂f/∂x` has all eigenvalues `≤ -λ`, the
//! difference `Z = Y - X` of two solutions driven by independent noise of
//! strength σ has radial pull at least `λ‖Z‖` and noise strength `√2 σ`.
//! Comparing `‖Z‖` with an OU process of pull λ and noise `√2 σ` bounds
//! `P(sup_{t≤T} ‖Z_t‖ ≤ R)` from below.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::sampling::box_points;
use crate::drift::{DriftSpec, NoiseSpec};
use crate::error::{require_positive, Error, Result};
use crate::rate::{scaled_ou_rate, RateMethod, RateMethodKind};
use crate::spectral::{containment_lower_bound, BoundKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionEstimate {
    /// `-max` over samples of the largest eigenvalue of `(J + Jᵀ)/2`.
    pub lambda_hat: f64,
    pub n_samples: usize,
    pub n_skipped: usize,
    /// Relative finite-difference step: `h = fd_step · max(1, ‖x‖)`.
    pub fd_step: f64,
    /// Sample with the least negative eigenvalue.
    pub min_witness: Vec<f64>,
    pub domain: String,
}

/// Largest eigenvalue of the symmetric part of the central-difference
/// Jacobian at `x`.
fn symmetric_jacobian_max(f: &DriftSpec, x: &[f64], fd_step: f64) -> Result<f64> {
    let d = x.len();
    let h = fd_step * crate::drift::norm(x).max(1.0);
    let mut jac = DMatrix::<f64>::zeros(d, d);
    let mut xp = x.to_vec();
    let (mut fp, mut fm) = (vec![0.0; d], vec![0.0; d]);
    for j in 0..d {
        xp[j] = x[j] + h;
        f.eval_into(&xp, &mut fp)?;
        xp[j] = x[j] - h;
        f.eval_into(&xp, &mut fm)?;
        xp[j] = x[j];
        for i in 0..d {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let value = if d == 1 {
        jac[(0, 0)]
    } else {
        let sym = (&jac + jac.transpose()) * 0.5;
        SymmetricEigen::new(sym).eigenvalues.max()
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { step: 0 })
    }
}

/// Compass search maximizing `objective` inside the box `[-K, K]^d`.
fn refine(objective: &impl Fn(&[f64]) -> Option<f64>, start: &[f64], value: f64, k: f64) -> (Vec<f64>, f64) {
    let mut best = (start.to_vec(), value);
    let mut step = k / 8.0;
    let min_step = 1e-10 * k.max(1.0);
    let mut evals = 0;
    while step > min_step && evals < 20_000 {
        let mut improved = false;
        for j in 0..start.len() {
            for dir in [1.0, -1.0] {
                let mut trial = best.0.clone();
                trial[j] = (trial[j] + dir * step).clamp(-k, k);
                evals += 1;
                if let Some(v) = objective(&trial) {
                    if v > best.1 {
                        best = (trial, v);
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Number of best samples polished by compass search.
const REFINED_SAMPLES: usize = 4;

/// Estimates the contraction rate of `f` over `[-K, K]^d` from `n_samples`
/// quasi-random points, each refined locally when it is among the
/// [`REFINED_SAMPLES`] worst. Samples where `f` cannot be evaluated are
/// skipped and counted; if all are skipped the call fails.
pub fn contraction_rate(
    f: &DriftSpec,
    sample_box: f64,
    n_samples: usize,
    fd_step: f64,
    seed: u64,
) -> Result<ContractionEstimate> {
    require_positive("K", sample_box)?;
    require_positive("fd_step", fd_step)?;
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be at least 1"));
    }
    let d = f.dimension();
    let objective = |x: &[f64]| symmetric_jacobian_max(f, x, fd_step).ok();
    let mut scored = Vec::with_capacity(n_samples);
    let mut skipped = 0;
    for x in box_points(n_samples, d, sample_box, seed) {
        match objective(&x) {
            Some(v) => scored.push((x, v)),
            None => skipped += 1,
        }
    }
    if scored.is_empty() {
        return Err(Error::invalid(
            "drift",
            format!("Jacobian could not be evaluated at any of the {n_samples} samples"),
        ));
    }
    // Stable sort: ties keep sample order.
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut best = scored[0].clone();
    for (x, v) in scored.iter().take(REFINED_SAMPLES) {
        let cand = refine(&objective, x, *v, sample_box);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    Ok(ContractionEstimate {
        lambda_hat: -best.1,
        n_samples,
        n_skipped: skipped,
        fd_step,
        min_witness: best.0,
        domain: format!("[-{sample_box}, {sample_box}]^{d}"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProvenanceStep {
    pub step: u32,
    pub claim: String,
    pub anchor: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuBound {
    /// Lower bound (or approximation, see `kind`) on
    /// `P(sup_{t≤T} ‖Y_t - X_t‖ ≤ R)`.
    pub probability: f64,
    /// Decay rate of the reference OU process.
    pub mu: f64,
    pub method: RateMethodKind,
    pub kind: BoundKind,
    pub provenance: Vec<ProvenanceStep>,
}

/// Containment bound for the distance of two solutions of a system
/// contracting at rate λ with noise σ: the OU process with pull λ and noise
/// `√2 σ`, evaluated at `R` and `T` by `method`. `R = 0` gives 0.
pub fn contraction_to_ou_bound(
    lambda: f64,
    noise: NoiseSpec,
    radius: f64,
    horizon: f64,
    method: &dyn RateMethod,
) -> Result<OuBound> {
    require_positive("lambda", lambda)?;
    require_positive("sigma", noise.sigma)?;
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::invalid("R", format!("must be finite and >= 0, got {radius}")));
    }
    let sigma_z = std::f64::consts::SQRT_2 * noise.sigma;
    let kind = if method.is_guaranteed() {
        BoundKind::Guaranteed
    } else {
        BoundKind::AsymptoticApproximation
    };
    let mut provenance = vec![
        ProvenanceStep {
            step: 1,
            claim: format!(
                "symmetric part of the drift Jacobian has eigenvalues <= -{lambda} (contraction rate {lambda})"
            ),
            anchor: "contraction rate",
        },
        ProvenanceStep {
            step: 2,
            claim: format!(
                "the distance Z = Y - X of two independently driven copies has radial drift component <= -{lambda}|Z| \
                 and noise strength sqrt(2)*sigma = {sigma_z}"
            ),
            anchor: "radial pull of the distance process",
        },
        ProvenanceStep {
            step: 3,
            claim: format!(
                "pull dominance of OU({lambda}) under sign coupling (d = 1) or rotation coupling (d >= 2) gives \
                 P(sup |Z| <= R) >= P(sup |U| <= R) for U an OU process with pull {lambda} and noise {sigma_z}"
            ),
            anchor: "comparison theorem",
        },
    ];
    if radius == 0.0 {
        provenance.push(ProvenanceStep {
            step: 4,
            claim: "a noisy process is never confined to a zero radius: bound 0".into(),
            anchor: "zero radius",
        });
        return Ok(OuBound {
            probability: 0.0,
            mu: f64::INFINITY,
            method: method.kind(),
            kind,
            provenance,
        });
    }
    let rate = scaled_ou_rate(method, lambda, sigma_z, radius)?;
    let bound = containment_lower_bound(&rate, horizon)?;
    provenance.push(ProvenanceStep {
        step: 4,
        claim: format!(
            "{} rate of the normalized OU process at radius R*sqrt(2*lambda)/({sigma_z}) = {}, scaled by lambda: mu = {}; \
             exp(-mu*T) at T = {horizon} is {} ({})",
            method.name(),
            radius * (2.0 * lambda).sqrt() / sigma_z,
            rate.mu,
            bound.probability,
            kind.label()
        ),
        anchor: "OU containment decay rate",
    });
    Ok(OuBound {
        probability: bound.probability,
        mu: rate.mu,
        method: method.kind(),
        kind,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{AsymptoticMethod, KushnerMethod};

    #[test]
    fn linear_drift_is_exact() {
        for d in [1, 2, 3] {
            let e = contraction_rate(&DriftSpec::ou(1.0, d).unwrap(), 2.0, 64, 1e-5, 0).unwrap();
            assert!((e.lambda_hat - 1.0).abs() < 1e-8, "d = {d}: {}", e.lambda_hat);
        }
    }

    #[test]
    fn cubic_contracts_at_unit_rate() {
        let f = DriftSpec::expression("-x - x^3").unwrap();
        let e = contraction_rate(&f, 2.0, 256, 1e-5, 0).unwrap();
        assert!((e.lambda_hat - 1.0).abs() < 1e-6, "{}", e.lambda_hat);
        assert!(e.min_witness[0].abs() < 1e-3);
    }

    #[test]
    fn expanding_drift() {
        let e = contraction_rate(&DriftSpec::expression("x").unwrap(), 2.0, 16, 1e-5, 0).unwrap();
        assert!((e.lambda_hat + 1.0).abs() < 1e-8);
    }

    #[test]
    fn all_samples_failing_is_an_error() {
        let f = DriftSpec::expression("(0 - 1)^x").unwrap();
        assert!(contraction_rate(&f, 2.0, 8, 1e-5, 0).is_err());
    }

    #[test]
    fn zero_radius_bound() {
        let b = contraction_to_ou_bound(1.0, NoiseSpec::new(1.0).unwrap(), 0.0, 5.0, &KushnerMethod).unwrap();
        assert_eq!(b.probability, 0.0);
        assert!(contraction_to_ou_bound(0.0, NoiseSpec::new(1.0).unwrap(), 1.0, 5.0, &KushnerMethod).is_err());
    }

    #[test]
    fn unit_noise_distance_matches_scaled_rates() {
        // λ = 1, σ = 1/√2: Z has noise 1, i.e. the normalized process at R√2.
        let noise = NoiseSpec::new(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let k = contraction_to_ou_bound(1.0, noise, 3.0, 5.0, &KushnerMethod).unwrap();
        assert!((k.probability - (-(2.0 / 18.0) * 5.0f64).exp()).abs() < 1e-12);
        assert_eq!(k.kind, BoundKind::Guaranteed);
        let a = contraction_to_ou_bound(1.0, noise, 3.0, 5.0, &AsymptoticMethod).unwrap();
        let mu = crate::spectral::asymptotic_rate(3.0 * 2f64.sqrt()).unwrap().mu;
        assert!((a.probability - (-mu * 5.0).exp()).abs() < 1e-12);
        assert!(a.probability > k.probability);
        assert_eq!(a.provenance.len(), 4);
        assert!(a.provenance.windows(2).all(|w| w[0].step < w[1].step));
    }
}
