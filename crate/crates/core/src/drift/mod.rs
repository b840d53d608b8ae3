//! Drift fields, noise and containment queries.

pub mod expr;
pub mod family;
pub mod rotation;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{require_positive, Error, Result};
use expr::{EvalError, ScalarFn};

pub use family::{DriftFamily, DriftRegistry, ParamValue, Params};
pub use rotation::{apply_rotation_transpose, rotation_to_e1};

/// Concrete shape of a drift field.
#[derive(Debug, Clone, PartialEq)]
pub enum DriftForm {
    /// `f(x) = -λ x`.
    Ou { lambda: f64 },
    /// `f(x) = -λ_right x` for `x > 0`, `-λ_left x` for `x < 0` (1-d only).
    Piecewise { lambda_left: f64, lambda_right: f64 },
    /// Arbitrary scalar `f(x)` (1-d only).
    Expression(ScalarFn),
    /// `f(x) = ρ(‖x‖) x/‖x‖`, `f(0) = 0`.
    Radial(ScalarFn),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftSpec {
    dimension: usize,
    form: DriftForm,
}

impl DriftSpec {
    pub fn ou(lambda: f64, dimension: usize) -> Result<Self> {
        require_positive("lambda", lambda)?;
        require_dimension(dimension)?;
        Ok(Self {
            dimension,
            form: DriftForm::Ou { lambda },
        })
    }

    pub fn piecewise(lambda_left: f64, lambda_right: f64) -> Result<Self> {
        require_positive("lambda_left", lambda_left)?;
        require_positive("lambda_right", lambda_right)?;
        Ok(Self {
            dimension: 1,
            form: DriftForm::Piecewise {
                lambda_left,
                lambda_right,
            },
        })
    }

    /// A 1-d drift `f(x)` given as an expression in `x`.
    pub fn expression(source: &str) -> Result<Self> {
        Ok(Self {
            dimension: 1,
            form: DriftForm::Expression(ScalarFn::parse(source, "x")?),
        })
    }

    /// A radial drift with profile `ρ(r)` given as an expression in `r`.
    pub fn radial(profile: &str, dimension: usize) -> Result<Self> {
        require_dimension(dimension)?;
        Ok(Self {
            dimension,
            form: DriftForm::Radial(ScalarFn::parse(profile, "r")?),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn form(&self) -> &DriftForm {
        &self.form
    }

    pub fn family(&self) -> &'static str {
        match self.form {
            DriftForm::Ou { .. } => "ou",
            DriftForm::Piecewise { .. } => "piecewise",
            DriftForm::Expression(_) => "expression",
            DriftForm::Radial(_) => "radial",
        }
    }

    /// Largest pull-strength parameter of a built-in family, used by the
    /// integrators' stiffness guard. `None` for expression-based drifts.
    pub fn max_pull(&self) -> Option<f64> {
        match self.form {
            DriftForm::Ou { lambda } => Some(lambda),
            DriftForm::Piecewise {
                lambda_left,
                lambda_right,
            } => Some(lambda_left.max(lambda_right)),
            _ => None,
        }
    }

    /// Evaluates `f(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.dimension];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// Writes `f(x)` into `out`. Lengths are the caller's responsibility.
    #[inline]
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        debug_assert_eq!(x.len(), self.dimension);
        debug_assert_eq!(out.len(), self.dimension);
        match &self.form {
            DriftForm::Ou { lambda } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = -lambda * xi;
                }
            }
            DriftForm::Radial(profile) => {
                let r = norm(x);
                if r == 0.0 {
                    out.fill(0.0);
                } else {
                    let scale = profile.eval(r)? / r;
                    for (o, xi) in out.iter_mut().zip(x) {
                        *o = scale * xi;
                    }
                }
            }
            _ => out[0] = self.eval_scalar(x[0])?,
        }
        Ok(())
    }

    /// Scalar fast path for 1-d drifts. For radial profiles in 1-d this is
    /// `ρ(|x|) sgn(x)`.
    #[inline]
    pub fn eval_scalar(&self, x: f64) -> Result<f64, EvalError> {
        match &self.form {
            DriftForm::Ou { lambda } => Ok(-lambda * x),
            DriftForm::Piecewise {
                lambda_left,
                lambda_right,
            } => Ok(if x > 0.0 {
                -lambda_right * x
            } else if x < 0.0 {
                -lambda_left * x
            } else {
                0.0
            }),
            DriftForm::Expression(f) => f.eval(x),
            DriftForm::Radial(profile) => {
                if x == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(profile.eval(x.abs())? * expr::sgn(x))
                }
            }
        }
    }

    /// Configuration-section view of this drift (the keys accepted by
    /// [`DriftRegistry::build`]).
    pub fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("family".into(), ParamValue::Text(self.family().into()));
        match &self.form {
            DriftForm::Ou { lambda } => {
                p.insert("lambda".into(), ParamValue::Number(*lambda));
                p.insert("dimension".into(), ParamValue::Number(self.dimension as f64));
            }
            DriftForm::Piecewise {
                lambda_left,
                lambda_right,
            } => {
                p.insert("lambda_left".into(), ParamValue::Number(*lambda_left));
                p.insert("lambda_right".into(), ParamValue::Number(*lambda_right));
            }
            DriftForm::Expression(f) => {
                p.insert("source".into(), ParamValue::Text(f.source().into()));
            }
            DriftForm::Radial(f) => {
                p.insert("source".into(), ParamValue::Text(f.source().into()));
                p.insert("dimension".into(), ParamValue::Number(self.dimension as f64));
            }
        }
        p
    }
}

impl Serialize for DriftSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let params = self.to_params();
        let mut map = serializer.serialize_map(Some(params.len()))?;
        for (k, v) in &params {
            match v {
                ParamValue::Number(n) if k == "dimension" => map.serialize_entry(k, &(*n as u64))?,
                ParamValue::Number(n) => map.serialize_entry(k, n)?,
                ParamValue::Text(s) => map.serialize_entry(k, s)?,
            }
        }
        map.end()
    }
}

fn require_dimension(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::invalid("dimension", "must be a positive integer"))
    } else {
        Ok(())
    }
}

/// Additive noise strength σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub sigma: f64,
}

impl NoiseSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        require_positive("sigma", sigma)?;
        Ok(Self { sigma })
    }

    /// σ = 0: the deterministic limit, used to check integrators against ODEs.
    pub fn zero() -> Self {
        Self { sigma: 0.0 }
    }
}

/// Containment radius `R`, horizon `T` and dominance-check radius `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContainmentQuery {
    pub radius: f64,
    pub horizon: f64,
    pub check_radius: f64,
}

impl ContainmentQuery {
    pub fn new(radius: f64, horizon: f64, check_radius: f64) -> Result<Self> {
        require_positive("R", radius)?;
        require_positive("T", horizon)?;
        require_positive("K", check_radius)?;
        if radius > check_radius {
            return Err(Error::invalid(
                "R",
                format!("must not exceed K (R = {radius}, K = {check_radius})"),
            ));
        }
        Ok(Self {
            radius,
            horizon,
            check_radius,
        })
    }
}

#[inline]
pub(crate) fn norm(x: &[f64]) -> f64 {
    if x.len() == 1 {
        x[0].abs()
    } else {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
