//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Run with `cargo test -p pullbound-cli --test acceptance`.
//! Criteria 4, 5 and 10 take several minutes; 10 reuses the artifacts
//! produced for 4 and 5.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use pullbound::dominance::{check_dominance, contraction_rate, GridParams, Verdict};
use pullbound::mc::{containment_profile, containment_profile_with, pooled_se, McSettings};
use pullbound::sim::{simulate_coupled_1d, simulate_coupled_nd, PlainNoise, RotationCoupling};
use pullbound::spectral::solver::{Domain, Weight};
use pullbound::spectral::{
    asymptotic_rate, kushner_rate, sturm_liouville_rate, sturm_liouville_rate_with, SpectralConfig,
};
use pullbound::{CoupledPair, DriftSpec, NoiseSpec, RngStream};
use pullbound_cli::{run, Options};

type Row = HashMap<String, String>;

#[derive(Default)]
struct Report {
    failed: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, what: &str, pass: bool, detail: String) {
        println!("{} [{id}] {what} | {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id.to_string());
        }
    }

    fn error(&mut self, id: &str, what: &str, err: impl std::fmt::Display) {
        self.check(id, what, false, format!("error: {err}"));
    }
}

fn table(text: &str) -> Vec<Row> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(str::to_string)
        .collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

fn num(row: &Row, key: &str) -> f64 {
    row.get(key).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn closed_forms(rep: &mut Report) {
    let what = "Kushner rate closed form: mu_K(2) = 1/2, mu_K(3) = 2/9";
    match (kushner_rate(2.0), kushner_rate(3.0)) {
        (Ok(a), Ok(b)) => {
            let pass =
                (a.mu - 0.5).abs() <= f64::EPSILON * 0.5 && (b.mu - 2.0 / 9.0).abs() <= f64::EPSILON * (2.0 / 9.0);
            rep.check("1", what, pass, format!("mu_K(2) = {:e}, mu_K(3) = {:e}", a.mu, b.mu));
        }
        (Err(e), _) | (_, Err(e)) => rep.error("1", what, e),
    }
}

fn dirichlet_oracle(rep: &mut Report) {
    let what = "spectral solver without drift: (pi/2R)^2 within 1e-4 relative, < 1 s per radius";
    let mut detail = vec![];
    let mut pass = true;
    for r in [0.5, 1.0, 2.0] {
        let start = Instant::now();
        match sturm_liouville_rate_with(r, SpectralConfig::default(), Weight::Unit, Domain::Symmetric) {
            Ok(est) => {
                let secs = start.elapsed().as_secs_f64();
                let exact = (std::f64::consts::PI / (2.0 * r)).powi(2);
                let err = rel(est.mu, exact);
                pass &= err <= 1e-4 && secs < 1.0;
                detail.push(format!("R={r}: rel err {err:.1e} in {secs:.2}s"));
            }
            Err(e) => return rep.error("2", what, e),
        }
    }
    rep.check("2", what, pass, detail.join(", "));
}

fn asymptotic_agreement(rep: &mut Report) {
    let what = "spectral rate within 15% of the asymptotic rate at R = 3, 3.5, 4 (< 5 s)";
    let start = Instant::now();
    let mut detail = vec![];
    let mut pass = true;
    for r in [3.0, 3.5, 4.0] {
        match (sturm_liouville_rate(r, SpectralConfig::default()), asymptotic_rate(r)) {
            (Ok(s), Ok(a)) => {
                let err = rel(s.mu, a.mu);
                pass &= err <= 0.15;
                detail.push(format!(
                    "R={r}: spectral {:.6e} asymptotic {:.6e} (ratio {:.3})",
                    s.mu,
                    a.mu,
                    s.mu / a.mu
                ));
            }
            (Err(e), _) | (_, Err(e)) => return rep.error("3", what, e),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 5.0;
    detail.push(format!("{secs:.2}s"));
    rep.check("3", what, pass, detail.join(", "));
}

const DECAY_CONFIG: &str = r#"
seed = 2024
[rates]
radii = [3.0]
[mc]
n_paths = 100000
dt = 1e-3
bridge_correction = true
horizons = [5.0, 10.0, 15.0]
"#;

const COUNTEREXAMPLE_CONFIG: &str = r#"
seed = 2024
[sweep]
lambdas = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1e3, 1e4]
R = 0.5
T = 1.0
n_paths = 200000
dt = 1e-4
bridge_correction = true
reflected_reference = true
"#;

/// Runs an experiment inside a pool of `workers` threads.
fn artifact(name: &str, config: &str, workers: usize) -> Result<Vec<u8>, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| e.to_string())?;
    let outcome = pool
        .install(|| run(name, config, Options::default()))
        .map_err(|e| e.to_string())?;
    Ok(outcome.primary().to_vec())
}

fn decay_cross_check(rep: &mut Report, bytes: &Result<Vec<u8>, String>) {
    let what =
        "Monte Carlo decay fit at R=3 (T = 5, 10, 15; 1e5 paths; dt 1e-3, bridge) within 3 SE of the spectral rate";
    let bytes = match bytes {
        Ok(b) => b,
        Err(e) => return rep.error("4", what, e),
    };
    let rows = table(&String::from_utf8_lossy(bytes));
    let Some(row) = rows.first() else {
        return rep.error("4", what, "no rows");
    };
    let (mc, se, spectral) = (num(row, "mu_mc"), num(row, "mu_mc_stderr"), num(row, "mu_spectral"));
    let gap = (mc - spectral).abs();
    rep.check(
        "4",
        what,
        gap <= 3.0 * se,
        format!(
            "mu_mc = {mc:.6e} +- {se:.2e}, spectral = {spectral:.6e}, gap = {:.2} SE; p_hat(5,10,15) = {}, {}, {}",
            gap / se,
            row["p_hat_T5"],
            row["p_hat_T10"],
            row["p_hat_T15"]
        ),
    );
}

fn counterexample_shape(rep: &mut Report, bytes: &Result<Vec<u8>, String>) {
    let what = "piecewise-pull containment at R=0.5, T=1, 2e5 paired paths";
    let bytes = match bytes {
        Ok(b) => b,
        Err(e) => {
            for id in ["5a", "5b", "5c"] {
                rep.error(id, what, e);
            }
            return;
        }
    };
    let rows = table(&String::from_utf8_lossy(bytes));
    let sweep: Vec<&Row> = rows.iter().filter(|r| r["row"] == "sweep").collect();
    let at = |lambda: f64| sweep.iter().copied().find(|r| num(r, "lambda") == lambda);
    let listing: Vec<String> = sweep
        .iter()
        .map(|r| format!("{}:{}", r["lambda"], r["p_hat"]))
        .collect();

    match (at(1.0), at(20.0)) {
        (Some(p1), Some(p20)) => rep.check(
            "5a",
            "P(20) > P(1) with disjoint 99% intervals",
            num(p20, "p_hat") > num(p1, "p_hat") && num(p20, "ci99_low") > num(p1, "ci99_high"),
            format!(
                "P(1) = {} [{}, {}], P(20) = {} [{}, {}]",
                p1["p_hat"], p1["ci99_low"], p1["ci99_high"], p20["p_hat"], p20["ci99_low"], p20["ci99_high"]
            ),
        ),
        _ => rep.error(
            "5a",
            "P(20) > P(1) with disjoint 99% intervals",
            "lambda 1 or 20 missing",
        ),
    }

    let best = sweep.iter().max_by(|a, b| num(a, "p_hat").total_cmp(&num(b, "p_hat")));
    match best {
        Some(best) => {
            let arg = num(best, "lambda");
            rep.check(
                "5b",
                "argmax of p_hat over the lambda grid lies in {10, 20, 50}",
                [10.0, 20.0, 50.0].contains(&arg),
                format!("argmax = {arg}; {}", listing.join(" ")),
            );
        }
        None => rep.error("5b", "argmax over the lambda grid", "no sweep rows"),
    }

    let what_c = "|P(1e4) - P_reflected(OU(1))| <= 3 pooled SE";
    match (at(1e4), rows.iter().find(|r| r["row"] == "reflected")) {
        (Some(big), Some(refl)) => {
            let se = num(big, "se").hypot(num(refl, "se"));
            let gap = (num(big, "p_hat") - num(refl, "p_hat")).abs();
            rep.check(
                "5c",
                what_c,
                gap <= 3.0 * se,
                format!(
                    "P(1e4) = {}, P_reflected = {}, gap = {:.2} pooled SE",
                    big["p_hat"],
                    refl["p_hat"],
                    gap / se
                ),
            );
        }
        _ => rep.error("5c", what_c, "lambda 1e4 or reflected row missing"),
    }
}

fn worst_violation(pairs: impl Fn(u64) -> pullbound::Result<CoupledPair> + Sync, n: u64) -> pullbound::Result<f64> {
    (0..n)
        .into_par_iter()
        .map(|i| pairs(i).map(|p| p.max_violation()))
        .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))
}

fn pathwise(rep: &mut Report, id: &str, what: &str, f: &DriftSpec, g: &DriftSpec, seed: u64) {
    let at = |dt: f64| {
        worst_violation(
            |i| {
                if f.dimension() == 1 {
                    simulate_coupled_1d(f, g, dt, 1.0, 4.0, RngStream::new(seed, i))
                } else {
                    simulate_coupled_nd(f, g, dt, 1.0, 4.0, RngStream::new(seed, i))
                }
            },
            1000,
        )
    };
    match (at(1e-3), at(1e-4)) {
        (Ok(coarse), Ok(fine)) => {
            let tol = 10.0 * 1e-4f64.sqrt();
            rep.check(
                id,
                what,
                fine <= tol && coarse > fine,
                format!("max violation dt=1e-4: {fine:.3e} (tolerance {tol}), dt=1e-3: {coarse:.3e}"),
            );
        }
        (Err(e), _) | (_, Err(e)) => rep.error(id, what, e),
    }
}

fn marginal_law(rep: &mut Report) {
    let what = "rotated noise keeps the plain containment law (OU(1), d=2, R=2, T=1, 1e5 paths) within 3 pooled SE";
    let ou = DriftSpec::ou(1.0, 2).expect("valid drift");
    let noise = NoiseSpec::new(1.0).expect("valid noise");
    let settings = |seed| McSettings {
        n_paths: 100_000,
        dt: 1e-3,
        master_seed: seed,
        bridge_correction: false,
    };
    let est = |coupling: &dyn pullbound::sim::NoiseCoupling, seed| {
        containment_profile_with(&ou, noise, coupling, &[0.0, 0.0], &[2.0], &[1.0], settings(seed))
            .map(|mut v| v.remove(0).remove(0))
    };
    match (est(&RotationCoupling, 1), est(&PlainNoise, 2)) {
        (Ok(a), Ok(b)) => {
            let se = pooled_se(&a, &b);
            rep.check(
                "7b",
                what,
                (a.p_hat - b.p_hat).abs() <= 3.0 * se,
                format!(
                    "rotated {} plain {} gap {:.2} SE",
                    a.p_hat,
                    b.p_hat,
                    (a.p_hat - b.p_hat).abs() / se
                ),
            );
        }
        (Err(e), _) | (_, Err(e)) => rep.error("7b", what, e),
    }
}

fn probability_ordering(rep: &mut Report) {
    let what = "checker-approved pairs: p_X >= p_Y - 3 pooled SE at R = K/2, K (K=2, T=1, 2e4 paths)";
    let trap = "-5*r*(1 - sgn(max(r - 1, 0)))";
    let weak = "-r*(1 - sgn(max(r - 1, 0)))";
    let pairs = [
        ("ou2/ou1", DriftSpec::ou(2.0, 1), DriftSpec::ou(1.0, 1)),
        ("cubic/ou1", DriftSpec::expression("-x - x^3"), DriftSpec::ou(1.0, 1)),
        ("pw20/ou1", DriftSpec::piecewise(20.0, 1.0), DriftSpec::ou(1.0, 1)),
        ("pw3-2/ou1", DriftSpec::piecewise(3.0, 2.0), DriftSpec::ou(1.0, 1)),
        (
            "radial2/radial1",
            DriftSpec::radial("-2*r", 2),
            DriftSpec::radial("-r", 2),
        ),
        ("ou2-2d/radial1", DriftSpec::ou(2.0, 2), DriftSpec::radial("-r", 2)),
        ("trap5/trap1", DriftSpec::radial(trap, 2), DriftSpec::radial(weak, 2)),
    ];
    let k = 2.0;
    let settings = McSettings {
        n_paths: 20_000,
        dt: 1e-3,
        master_seed: 41,
        bridge_correction: true,
    };
    let noise = NoiseSpec::new(1.0).expect("valid noise");
    let mut pass = true;
    let mut worst = f64::INFINITY;
    let mut detail = vec![];
    for (name, f, g) in pairs {
        let (f, g) = match (f, g) {
            (Ok(f), Ok(g)) => (f, g),
            (Err(e), _) | (_, Err(e)) => return rep.error("8", what, e),
        };
        let approved = check_dominance(&f, &g, k, GridParams::default()).map(|r| r.verdict == Verdict::Holds);
        if !matches!(approved, Ok(true)) {
            pass = false;
            detail.push(format!("{name}: not approved"));
            continue;
        }
        let x0 = vec![0.0; f.dimension()];
        let radii = [k / 2.0, k];
        let (px, py) = match (
            containment_profile(&f, noise, &x0, &radii, &[1.0], settings),
            containment_profile(&g, noise, &x0, &radii, &[1.0], settings),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return rep.error("8", what, e),
        };
        for i in 0..2 {
            let (a, b) = (&px[i][0], &py[i][0]);
            let z = (a.p_hat - b.p_hat) / pooled_se(a, b).max(f64::MIN_POSITIVE);
            worst = worst.min(z);
            if z < -3.0 {
                pass = false;
                detail.push(format!("{name} R={}: {} vs {}", radii[i], a.p_hat, b.p_hat));
            }
        }
    }
    detail.insert(0, format!("7 pairs, smallest (p_X - p_Y)/SE = {worst:.2}"));
    rep.check("8", what, pass, detail.join("; "));
}

const BOUND_CONFIG: &str = r#"
seed = 2024
rate_method = "asymptotic"
[drift]
family = "expression"
source = "-x - x^3"
[noise]
sigma = 0.7071067811865476
[query]
R = 3.0
T = 5.0
[mc]
n_paths = 100000
dt = 1e-3
"#;

fn contraction_pipeline(rep: &mut Report) {
    let what = "contraction rate of -x - x^3 on [-2, 2] is 1 within 1e-6";
    match DriftSpec::expression("-x - x^3").and_then(|f| contraction_rate(&f, 2.0, 256, 1e-5, 2024)) {
        Ok(est) => rep.check(
            "9a",
            what,
            (est.lambda_hat - 1.0).abs() <= 1e-6,
            format!("lambda_hat = {} at {:?}", est.lambda_hat, est.min_witness),
        ),
        Err(e) => rep.error("9a", what, e),
    }

    let outcome = match run("bound", BOUND_CONFIG, Options::default()) {
        Ok(o) => o,
        Err(e) => {
            rep.error("9b", "bound for -x - x^3, sigma = 1/sqrt(2), R=3, T=5", &e);
            return rep.error("9c", "Monte Carlo respects the bound", e);
        }
    };
    let v: serde_json::Value = serde_json::from_slice(outcome.primary()).unwrap_or_default();
    let bound = v["bound"]["probability"].as_f64();
    rep.check(
        "9b",
        "bound for -x - x^3, sigma = 1/sqrt(2), R=3, T=5 (asymptotic) is 0.9357 to within 1e-3",
        bound.is_some_and(|b| (b - 0.9357).abs() <= 1e-3),
        format!(
            "bound = {bound:?}, verdict = {}, lambda = {}",
            v["verdict"], v["lambda"]
        ),
    );
    let mc = &v["monte_carlo"];
    let (p, se) = (mc["estimate"]["p_hat"].as_f64(), mc["standard_error"].as_f64());
    rep.check(
        "9c",
        "direct Monte Carlo of the two-copy gap respects the bound: p_hat >= bound - 3 SE",
        mc["respects_bound"] == serde_json::Value::Bool(true),
        format!("p_hat = {p:?}, SE = {se:?}, bound = {bound:?}"),
    );
}

fn main() -> ExitCode {
    let mut rep = Report::default();
    let start = Instant::now();

    closed_forms(&mut rep);
    dirichlet_oracle(&mut rep);
    asymptotic_agreement(&mut rep);

    let workers = [1, 4, 8];
    let decay: Vec<_> = workers
        .iter()
        .map(|&w| artifact("fig-decay", DECAY_CONFIG, w))
        .collect();
    decay_cross_check(&mut rep, &decay[2]);
    let sweep: Vec<_> = workers
        .iter()
        .map(|&w| artifact("fig-counterexample", COUNTEREXAMPLE_CONFIG, w))
        .collect();
    counterexample_shape(&mut rep, &sweep[2]);

    let ou2 = DriftSpec::ou(2.0, 1).expect("valid drift");
    let ou1 = DriftSpec::ou(1.0, 1).expect("valid drift");
    pathwise(
        &mut rep,
        "6",
        "sign-coupled OU(2)/OU(1), 1e3 paths, K=4, T=1: |X| <= |Y| + 10 sqrt(dt) at dt=1e-4, coarser dt worse",
        &ou2,
        &ou1,
        31,
    );
    let r2 = DriftSpec::radial("-2*r", 2).expect("valid drift");
    let r1 = DriftSpec::radial("-r", 2).expect("valid drift");
    pathwise(
        &mut rep,
        "7a",
        "rotation-coupled radial -2r/-r in d=2, same tolerances",
        &r2,
        &r1,
        32,
    );
    marginal_law(&mut rep);
    probability_ordering(&mut rep);
    contraction_pipeline(&mut rep);

    let what = "criteria 4 and 5 artifacts byte-identical across 1, 4, 8 workers";
    let identical = |runs: &[Result<Vec<u8>, String>]| runs.iter().all(|r| r.is_ok() && *r == runs[0]);
    rep.check(
        "10",
        what,
        identical(&decay) && identical(&sweep),
        format!(
            "decay identical: {}, counterexample identical: {}",
            identical(&decay),
            identical(&sweep)
        ),
    );

    println!(
        "acceptance: {} failed{} ({:.0}s)",
        rep.failed.len(),
        if rep.failed.is_empty() {
            String::new()
        } else {
            format!(": {}", rep.failed.join(", "))
        },
        start.elapsed().as_secs_f64()
    );
    if rep.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
