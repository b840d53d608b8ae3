//! Frozen reference values. Decay rates are roots of the Kummer function
//! `M(-ν/2, 1/2, R²/2)` computed in 30-digit arithmetic; containment
//! probabilities come from a fine Crank–Nicolson solve of the backward
//! Kolmogorov equation with absorbing walls.

use pullbound::mc::{containment_probability, counterexample_sweep, fit_decay_rate, pooled_se, McSettings};
use pullbound::rate::scaled_ou_rate;
use pullbound::spectral::{
    asymptotic_rate, containment_lower_bound, kushner_rate, sturm_liouville_rate, SpectralConfig, SpectralMethod,
};
use pullbound::{DriftSpec, NoiseSpec};

const DECAY: [(f64, f64); 7] = [
    (1.0, 2.0),
    (2.0, 0.242_992_880_8),
    (2.5, 0.082_608_738_04),
    (3.0, 0.023_946_300_64),
    (3.5, 0.005_549_627_931),
    (4.0, 0.000_993_081_879_1),
    (4.242_640_687_119_285, 0.000_391_082_929_7),
];

/// `P(sup_{t≤T} |X_t| ≤ 3)` for `dX = -X dt + √2 dB`, `X₀ = 0`.
const OU_CONTAINMENT_R3: [(f64, f64); 4] = [(1.0, 0.99332), (5.0, 0.904676), (10.0, 0.80259), (15.0, 0.71203)];

/// `P(sup_{t≤1} |X_t| ≤ 0.5)` for the piecewise drift with left pull λ,
/// right pull 1, unit noise.
const PIECEWISE_CONTAINMENT: [(f64, f64); 10] = [
    (1.0, 0.014550),
    (2.0, 0.01805),
    (5.0, 0.03192),
    (10.0, 0.06165),
    (20.0, 0.09536),
    (50.0, 0.06880),
    (100.0, 0.04874),
    (1e3, 0.02292),
    (1e4, 0.016958),
    (1e5, 0.015287),
];

fn ou_normalized() -> (DriftSpec, NoiseSpec) {
    (
        DriftSpec::ou(1.0, 1).unwrap(),
        NoiseSpec::new(std::f64::consts::SQRT_2).unwrap(),
    )
}

fn settings(n: u64, dt: f64, seed: u64) -> McSettings {
    McSettings {
        n_paths: n,
        dt,
        master_seed: seed,
        bridge_correction: true,
    }
}

#[test]
fn solver_matches_kummer_roots() {
    for (r, nu) in DECAY {
        let got = sturm_liouville_rate(r, SpectralConfig::default()).unwrap();
        assert!((got.mu - nu).abs() < 1e-6 * nu, "R={r}: {} vs {nu}", got.mu);
        let se = got.stderr.unwrap();
        assert!(se < 1e-6 * nu, "R={r}: stderr {se}");
    }
}

#[test]
fn closed_forms() {
    assert_eq!(kushner_rate(2.0).unwrap().mu, 0.5);
    assert_eq!(kushner_rate(3.0).unwrap().mu, 2.0 / 9.0);
    assert!((asymptotic_rate(3.0).unwrap().mu - 1.329_554e-2).abs() < 1e-8);
    // Asymptotic underestimates at small radius.
    let r1 = sturm_liouville_rate(1.0, SpectralConfig::default()).unwrap().mu;
    assert!(r1 > asymptotic_rate(1.0).unwrap().mu);
}

/// Allowed gap between a Monte Carlo estimate and an exact value: sampling
/// noise plus a small allowance for time discretization.
fn assert_close(p_hat: f64, se: f64, exact: f64, bias: f64, what: &str) {
    assert!(
        (p_hat - exact).abs() <= 4.0 * se + bias,
        "{what}: p_hat {p_hat}, exact {exact}, se {se}"
    );
}

#[test]
fn ou_containment_matches_exact_values() {
    let (ou, noise) = ou_normalized();
    for (t, exact) in OU_CONTAINMENT_R3.iter().take(2) {
        let e = containment_probability(&ou, noise, &[0.0], 3.0, *t, settings(20_000, 1e-3, 11)).unwrap();
        assert_close(e.p_hat, e.standard_error(), *exact, 1e-3, &format!("T={t}"));
        assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
    }
}

#[test]
fn single_horizon_sits_above_the_pure_exponential() {
    // At T = 5 the containment probability still carries an O(1) prefactor
    // over e^{-μT}: 0.9047 against 0.8872.
    let (_, exact) = OU_CONTAINMENT_R3[1];
    let pure = (-5.0 * DECAY[3].1).exp();
    assert!(exact / pure > 1.01 && exact / pure < 1.03);
}

#[test]
fn piecewise_containment_matches_exact_values() {
    for (lambda, exact) in [
        PIECEWISE_CONTAINMENT[0],
        PIECEWISE_CONTAINMENT[4],
        PIECEWISE_CONTAINMENT[8],
    ] {
        let sweep = counterexample_sweep(&[lambda], 0.5, 1.0, settings(20_000, 1e-4, 12)).unwrap();
        let e = &sweep[0].estimate;
        assert_close(e.p_hat, e.standard_error(), exact, 1e-3, &format!("lambda={lambda}"));
    }
}

#[test]
fn exact_counterexample_curve_peaks_near_twenty() {
    let best = PIECEWISE_CONTAINMENT.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(best.0, 20.0);
    // Slow return towards the λ = 1 value as the left wall hardens.
    assert!(PIECEWISE_CONTAINMENT[9].1 > PIECEWISE_CONTAINMENT[0].1);
    assert!(PIECEWISE_CONTAINMENT[9].1 < PIECEWISE_CONTAINMENT[8].1);
}

#[test]
fn decay_fit_recovers_the_spectral_rate() {
    let (ou, noise) = ou_normalized();
    // Smaller radius than the figure so a short run resolves the slope.
    let fit = fit_decay_rate(&ou, noise, &[0.0], 2.0, &[2.0, 4.0, 6.0], settings(20_000, 1e-3, 13)).unwrap();
    let mu = DECAY[1].1;
    let se = fit.rate.stderr.unwrap();
    assert!(
        (fit.rate.mu - mu).abs() < 3.0 * se + 2e-3,
        "fit {} ± {se}, exact {mu}",
        fit.rate.mu
    );
}

/// The change of variables maps `dX = -λX dt + σ dB` at radius `R` and
/// horizon `T` onto the normalized process at radius `R√(2λ)/σ` and horizon
/// `λT`; check it against simulation of the unnormalized process.
#[test]
fn scaled_rates_agree_with_simulation() {
    let (_, p5) = OU_CONTAINMENT_R3[1];
    for (lambda, sigma, radius, horizon) in [
        (2.0, 1.0, 1.5, 2.5),
        (0.5, 0.5, 1.5, 10.0),
        (1.0, 1.0, 2.0f64.sqrt() * 1.5, 5.0),
    ] {
        let drift = DriftSpec::ou(lambda, 1).unwrap();
        let noise = NoiseSpec::new(sigma).unwrap();
        let e = containment_probability(&drift, noise, &[0.0], radius, horizon, settings(20_000, 1e-3, 14)).unwrap();
        assert_close(
            e.p_hat,
            e.standard_error(),
            p5,
            1.5e-3,
            &format!("lambda={lambda} sigma={sigma}"),
        );

        let method = SpectralMethod(SpectralConfig::default());
        let rate = scaled_ou_rate(&method, lambda, sigma, radius).unwrap();
        assert!((rate.mu - lambda * DECAY[3].1).abs() < 1e-6 * rate.mu);
        let bound = containment_lower_bound(&rate, horizon).unwrap();
        assert!((bound.probability - (-5.0 * DECAY[3].1).exp()).abs() < 1e-6);
    }
}

#[test]
fn paired_seeds_share_paths_across_lambda() {
    let s = settings(5_000, 1e-3, 15);
    let sweep = counterexample_sweep(&[1.0, 1.0 + 1e-12], 0.5, 1.0, s).unwrap();
    assert_eq!(sweep[0].estimate.n_contained, sweep[1].estimate.n_contained);
    let se = pooled_se(&sweep[0].estimate, &sweep[1].estimate);
    assert!(se > 0.0);
}
