//! Symmetric pull-dominance checks.
//!
//! In 1-d, `f` dominates `g` on `[-K, K]` when
//!
//! ```text
//! f(x) ≤ min(g(x), -g(-x))   on [0, K]
//! f(x) ≥ max(g(x), -g(-x))   on [-K, 0]
//! ```
//!
//! and in d ≥ 2 when `sup_θ f(rθ)ᵀθ ≤ inf_θ g(rθ)ᵀθ` for `r ∈ [0, K]`.
//! Either condition, with both processes started at 0 and coupled through
//! the same noise, keeps `‖X_t‖ ≤ ‖Y_t‖` up to the first time `‖Y‖` reaches `K`.
//!
//! The checks are evaluated on finite grids; a positive margin is evidence,
//! not proof, unless the drifts are built-in families, for which the exact
//! verdict is also reported.

mod contraction;
pub mod sampling;

use serde::Serialize;

use crate::drift::{DriftForm, DriftSpec};
use crate::error::{require_positive, Error, Result};

pub use contraction::{contraction_rate, contraction_to_ou_bound, ContractionEstimate, OuBound, ProvenanceStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
}

impl Verdict {
    fn from_margin(margin: f64) -> Self {
        // NaN (never produced, but) counts as a violation.
        if margin >= 0.0 {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// `x` in 1-d, `[r]` in d ≥ 2.
    pub point: Vec<f64>,
    /// Slack of the condition at `point`; negative means violated.
    /// `None` when a drift could not be evaluated there.
    pub slack: Option<f64>,
    /// d ≥ 2: direction maximizing `f(rθ)ᵀθ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_f: Option<Vec<f64>>,
    /// d ≥ 2: direction minimizing `g(rθ)ᵀθ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_g: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactVerdict {
    pub verdict: Verdict,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub verdict: Verdict,
    /// Minimum slack over the grid; `-inf` (serialized as null) when a
    /// drift evaluation failed.
    pub margin: f64,
    /// The grid point of minimum slack, followed by any points where
    /// evaluation failed.
    pub witnesses: Vec<Witness>,
    pub grid: String,
    /// Closed-form verdict, available when both drifts are built-in families.
    pub exact: Option<ExactVerdict>,
    pub evaluation_failures: usize,
    pub note: &'static str,
}

const GRID_NOTE: &str = "margin measured on a finite grid: evidence, not proof";
const EXACT_NOTE: &str = "built-in families: exact verdict computed in closed form";
const MAX_FAILURE_WITNESSES: usize = 10;
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridParams {
    /// Points per half-line in 1-d.
    pub n_grid: usize,
    /// Radii in d ≥ 2.
    pub n_radial: usize,
    /// Directions in d ≥ 2.
    pub n_sphere: usize,
    pub seed: u64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            n_grid: 2001,
            n_radial: 401,
            n_sphere: 256,
            seed: 0,
        }
    }
}

/// Pull strengths `(left, right)` when the drift is `-a_left x` for `x < 0`
/// and `-a_right x` for `x > 0`.
fn linear_pulls(f: &DriftSpec) -> Option<(f64, f64)> {
    match *f.form() {
        DriftForm::Ou { lambda } => Some((lambda, lambda)),
        DriftForm::Piecewise {
            lambda_left,
            lambda_right,
        } => Some((lambda_left, lambda_right)),
        _ => None,
    }
}

/// Exact verdict for built-in pairs: the slack is `c|x|` (1-d) or `c r`
/// (radial OU), `c = min(f pulls) - max(g pulls)`.
fn exact_verdict(f: &DriftSpec, g: &DriftSpec, k: f64) -> Option<ExactVerdict> {
    let (fl, fr) = linear_pulls(f)?;
    let (gl, gr) = linear_pulls(g)?;
    let c = fl.min(fr) - gl.max(gr);
    let margin = k * c.min(0.0);
    Some(ExactVerdict {
        verdict: Verdict::from_margin(margin),
        margin,
    })
}

struct Scan {
    best: Option<(usize, f64)>,
    failures: Vec<(usize, String)>,
}

impl Scan {
    fn new() -> Self {
        Self {
            best: None,
            failures: Vec::new(),
        }
    }

    /// Slacks within a relative 1e-12 of the current minimum count as ties,
    /// which go to the smaller index.
    fn push(&mut self, index: usize, slack: Result<f64>) {
        let below = |s: f64, b: f64| s < b - TIE_TOLERANCE * b.abs().max(1.0);
        match slack {
            Ok(s) if self.best.is_none_or(|(_, b)| below(s, b)) => self.best = Some((index, s)),
            Ok(_) => {}
            Err(e) => self.failures.push((index, e.to_string())),
        }
    }

    fn margin(&self) -> f64 {
        if self.failures.is_empty() {
            self.best.map_or(f64::NEG_INFINITY, |(_, s)| s)
        } else {
            f64::NEG_INFINITY
        }
    }
}

fn check_1d_inputs(f: &DriftSpec, g: &DriftSpec, k: f64, n_grid: usize) -> Result<()> {
    for spec in [f, g] {
        if spec.dimension() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: spec.dimension(),
            });
        }
    }
    require_positive("K", k)?;
    if n_grid < 3 {
        return Err(Error::invalid("n_grid", "must be at least 3"));
    }
    Ok(())
}

/// Symmetric dominance of `f` over `g` in 1-d on `n_grid` uniform points of
/// `[0, K]` followed by `n_grid` points of `[-K, 0]` (`x = -K i/(n-1)`).
pub fn check_dominance_1d(f: &DriftSpec, g: &DriftSpec, k: f64, n_grid: usize) -> Result<DominanceReport> {
    check_1d_inputs(f, g, k, n_grid)?;
    let point = |idx: usize| {
        let i = idx % n_grid;
        let x = k * i as f64 / (n_grid - 1) as f64;
        if idx < n_grid {
            x
        } else {
            -x
        }
    };
    let slack = |idx: usize| -> Result<f64> {
        let x = point(idx);
        let fx = f.eval_scalar(x)?;
        let gx = g.eval_scalar(x)?;
        let mirrored = -g.eval_scalar(-x)?;
        Ok(if idx < n_grid {
            gx.min(mirrored) - fx
        } else {
            fx - gx.max(mirrored)
        })
    };
    let mut scan = Scan::new();
    for idx in 0..2 * n_grid {
        scan.push(idx, slack(idx));
    }
    let witness = |idx: usize, slack: Option<f64>, error: Option<String>| Witness {
        point: vec![point(idx)],
        slack,
        theta_f: None,
        theta_g: None,
        error,
    };
    let grid = format!("{n_grid} uniform points on [0, {k}] and {n_grid} on [-{k}, 0]");
    Ok(finish(scan, witness, grid, exact_verdict(f, g, k)))
}

fn finish(
    scan: Scan,
    witness: impl Fn(usize, Option<f64>, Option<String>) -> Witness,
    grid: String,
    exact: Option<ExactVerdict>,
) -> DominanceReport {
    let margin = scan.margin();
    let mut witnesses = Vec::new();
    if let Some((idx, s)) = scan.best {
        witnesses.push(witness(idx, Some(s), None));
    }
    for (idx, e) in scan.failures.iter().take(MAX_FAILURE_WITNESSES) {
        witnesses.push(witness(*idx, None, Some(e.clone())));
    }
    DominanceReport {
        verdict: Verdict::from_margin(margin),
        margin,
        witnesses,
        grid,
        note: if exact.is_some() { EXACT_NOTE } else { GRID_NOTE },
        exact,
        evaluation_failures: scan.failures.len(),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `f(rθ)ᵀθ`. OU and radial drifts do not depend on θ and are evaluated in
/// closed form, so equal profiles compare equal without rounding noise.
fn projection(f: &DriftSpec, r: f64, theta: &[f64], x: &mut [f64], fx: &mut [f64]) -> Result<f64> {
    match f.form() {
        DriftForm::Ou { lambda } => Ok(-lambda * r),
        DriftForm::Radial(_) if r == 0.0 => Ok(0.0),
        DriftForm::Radial(profile) => Ok(profile.eval(r)?),
        _ => {
            for (xi, t) in x.iter_mut().zip(theta) {
                *xi = r * t;
            }
            f.eval_into(x, fx)?;
            Ok(dot(fx, theta))
        }
    }
}

/// Radial dominance in d ≥ 2: `inf_θ g(rθ)ᵀθ - sup_θ f(rθ)ᵀθ` on the
/// radii `r_i = K i/(n_radial - 1)` and `n_sphere` quasi-uniform directions.
pub fn check_dominance_nd(
    f: &DriftSpec,
    g: &DriftSpec,
    k: f64,
    n_radial: usize,
    n_sphere: usize,
    seed: u64,
) -> Result<DominanceReport> {
    let d = f.dimension();
    if g.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: g.dimension(),
        });
    }
    if d < 2 {
        return Err(Error::invalid("dimension", "the radial check needs d ≥ 2"));
    }
    require_positive("K", k)?;
    if n_radial < 2 {
        return Err(Error::invalid("n_radial", "must be at least 2"));
    }
    if n_sphere < 1 {
        return Err(Error::invalid("n_sphere", "must be at least 1"));
    }
    let dirs = sampling::sphere_points(n_sphere, d, seed);
    let radius = |i: usize| k * i as f64 / (n_radial - 1) as f64;
    let mut scan = Scan::new();
    let mut args = Vec::with_capacity(n_radial);
    let mut x = vec![0.0; d];
    let (mut fx, mut gx) = (vec![0.0; d], vec![0.0; d]);
    for i in 0..n_radial {
        let r = radius(i);
        let mut sup_f = (f64::NEG_INFINITY, 0);
        let mut inf_g = (f64::INFINITY, 0);
        let mut failure = None;
        for (j, theta) in dirs.iter().enumerate() {
            let pair = projection(f, r, theta, &mut x, &mut fx)
                .and_then(|pf| Ok((pf, projection(g, r, theta, &mut x, &mut gx)?)));
            let (pf, pg) = match pair {
                Ok(p) => p,
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            };
            if pf > sup_f.0 {
                sup_f = (pf, j);
            }
            if pg < inf_g.0 {
                inf_g = (pg, j);
            }
        }
        args.push((sup_f.1, inf_g.1));
        scan.push(i, failure.map_or(Ok(inf_g.0 - sup_f.0), Err));
    }
    let witness = |i: usize, slack: Option<f64>, error: Option<String>| {
        let (jf, jg) = args[i];
        Witness {
            point: vec![radius(i)],
            slack,
            theta_f: error.is_none().then(|| dirs[jf].clone()),
            theta_g: error.is_none().then(|| dirs[jg].clone()),
            error,
        }
    };
    let exact = match (f.form(), g.form()) {
        (DriftForm::Ou { .. }, DriftForm::Ou { .. }) => exact_verdict(f, g, k),
        _ => None,
    };
    let grid = format!("{n_radial} radii uniform on [0, {k}] x {n_sphere} quasi-uniform directions (seed {seed})");
    Ok(finish(scan, witness, grid, exact))
}

/// Dominance of `f` over the OU drift `-λx` in `f`'s dimension.
pub fn check_ou_dominance(f: &DriftSpec, lambda: f64, k: f64, grid: GridParams) -> Result<DominanceReport> {
    let d = f.dimension();
    let ou = DriftSpec::ou(lambda, d)?;
    if d == 1 {
        check_dominance_1d(f, &ou, k, grid.n_grid)
    } else {
        check_dominance_nd(f, &ou, k, grid.n_radial, grid.n_sphere, grid.seed)
    }
}

/// Dispatches to the 1-d or d ≥ 2 check by dimension.
pub fn check_dominance(f: &DriftSpec, g: &DriftSpec, k: f64, grid: GridParams) -> Result<DominanceReport> {
    if f.dimension() == 1 {
        check_dominance_1d(f, g, k, grid.n_grid)
    } else {
        check_dominance_nd(f, g, k, grid.n_radial, grid.n_sphere, grid.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ou(l: f64) -> DriftSpec {
        DriftSpec::ou(l, 1).unwrap()
    }

    #[test]
    fn equal_drifts_hold_with_zero_margin() {
        let r = check_dominance_1d(&ou(1.0), &ou(1.0), 2.0, 101).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.margin, 0.0);
        assert_eq!(r.exact.unwrap().margin, 0.0);
        assert!(!r.witnesses.is_empty());
    }

    #[test]
    fn stronger_ou_holds() {
        let r = check_dominance_1d(&ou(2.0), &ou(1.0), 2.0, 101).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.margin, 0.0);
        assert_eq!(r.witnesses[0].point, vec![0.0]);
    }

    #[test]
    fn counterexample_drift_does_not_dominate() {
        let pw = DriftSpec::piecewise(20.0, 1.0).unwrap();
        let r = check_dominance_1d(&ou(1.0), &pw, 1.0, 101).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.witnesses[0].point, vec![1.0]);
        assert!((r.margin + 19.0).abs() < 1e-12);
        let exact = r.exact.unwrap();
        assert_eq!(exact.verdict, Verdict::Violated);
        assert!((exact.margin + 19.0).abs() < 1e-12);
        // The other way round it holds, with zero margin.
        let r = check_dominance_1d(&pw, &ou(1.0), 1.0, 101).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.exact.unwrap().margin, 0.0);
    }

    #[test]
    fn evaluation_failure_is_a_violation() {
        let f = DriftSpec::expression("-1/x").unwrap();
        let r = check_dominance_1d(&f, &ou(1.0), 1.0, 11).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.evaluation_failures > 0);
        assert!(r.witnesses.iter().any(|w| w.error.is_some() && w.point == vec![0.0]));
        assert_eq!(r.note, GRID_NOTE);
    }

    #[test]
    fn cubic_dominates_ou() {
        let f = DriftSpec::expression("-x - x^3").unwrap();
        let r = check_ou_dominance(&f, 1.0, 3.0, GridParams::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.margin, 0.0);
        assert_eq!(r.witnesses[0].point, vec![0.0]);
        assert!(r.exact.is_none());
    }

    #[test]
    fn weaker_ou_violates() {
        let r = check_ou_dominance(&ou(0.5), 1.0, 3.0, GridParams::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!((r.margin + 1.5).abs() < 1e-12);
    }

    #[test]
    fn radial_profiles() {
        let f = DriftSpec::radial("-2*r", 3).unwrap();
        let g = DriftSpec::radial("-r", 3).unwrap();
        let r = check_dominance_nd(&f, &g, 4.0, 41, 64, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.margin.abs() < 1e-12);
        assert_eq!(r.witnesses[0].point, vec![0.0]);
        let same = check_dominance_nd(&g, &g, 4.0, 41, 64, 1).unwrap();
        assert_eq!(same.verdict, Verdict::Holds);
        assert!(same.margin.abs() < 1e-12);
    }

    #[test]
    fn offset_profile_violates_at_small_radius() {
        let f = DriftSpec::radial("-r + 0.5", 2).unwrap();
        let g = DriftSpec::radial("-r", 2).unwrap();
        let r = check_dominance_nd(&f, &g, 2.0, 41, 32, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!((r.margin + 0.5).abs() < 1e-12);
        assert!(r.witnesses[0].point[0] < 0.5 && r.witnesses[0].point[0] > 0.0);
    }

    #[test]
    fn saturating_profile_violates_near_origin() {
        let f = DriftSpec::radial("-2*r*tanh(r)", 2).unwrap();
        let r = check_ou_dominance(&f, 1.0, 2.0, GridParams::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.witnesses[0].point[0] < 0.55);
    }

    #[test]
    fn report_serializes() {
        let r = check_dominance_1d(&ou(2.0), &ou(1.0), 2.0, 11).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "holds");
        assert!(v["witnesses"].is_array());
    }
}
