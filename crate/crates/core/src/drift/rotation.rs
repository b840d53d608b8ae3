//! The rotation `R_x` taking `x/‖x‖` to the first basis vector.
//!
//! `R_x` is only unique in d = 2. The construction here is deterministic:
//!
//! * d = 1: `R_x = [sgn(x)]`, with `R_0 = [1]`.
//! * d = 2: the Givens rotation by `-atan2(x₂, x₁)`.
//! * d ≥ 3: a Householder reflection composed with a coordinate sign flip.
//!   When `u₁ < 0` the reflector `v = u - e₁` maps `u` to `e₁` and the last
//!   coordinate is flipped; otherwise `w = u + e₁` maps `u` to `-e₁` and the
//!   first coordinate is flipped. Either choice avoids cancellation in the
//!   reflector and has determinant +1.
//!
//! `R_0 = Id` in every dimension.

use nalgebra::DMatrix;

use super::norm;

/// Builds `R_x` as a dense matrix.
pub fn rotation_to_e1(x: &[f64]) -> DMatrix<f64> {
    let d = x.len();
    let mut m = DMatrix::zeros(d, d);
    let mut col = vec![0.0; d];
    let mut unit = vec![0.0; d];
    // Column j of R is R e_j; R = (R^T)^T so build R^T e_j as row j.
    for j in 0..d {
        unit.fill(0.0);
        unit[j] = 1.0;
        apply_rotation_transpose(x, &unit, &mut col);
        for (i, v) in col.iter().enumerate() {
            m[(j, i)] = *v;
        }
    }
    m
}

/// Writes `R_xᵀ b` (= `R_x⁻¹ b`) into `out` without forming the matrix.
#[inline]
pub fn apply_rotation_transpose(x: &[f64], b: &[f64], out: &mut [f64]) {
    let d = x.len();
    debug_assert_eq!(b.len(), d);
    debug_assert_eq!(out.len(), d);
    let r = norm(x);
    if r == 0.0 {
        out.copy_from_slice(b);
        return;
    }
    match d {
        1 => out[0] = if x[0] < 0.0 { -b[0] } else { b[0] },
        2 => {
            let (c, s) = (x[0] / r, x[1] / r);
            out[0] = c * b[0] - s * b[1];
            out[1] = s * b[0] + c * b[1];
        }
        _ => {
            // R = D H with H symmetric, so R^T b = H (D b).
            let u0 = x[0] / r;
            out.copy_from_slice(b);
            let mut v: Vec<f64> = x.iter().map(|xi| xi / r).collect();
            if u0 < 0.0 {
                v[0] -= 1.0;
                out[d - 1] = -out[d - 1];
            } else {
                v[0] += 1.0;
                out[0] = -out[0];
            }
            let vv: f64 = v.iter().map(|a| a * a).sum();
            let vb: f64 = v.iter().zip(out.iter()).map(|(a, c)| a * c).sum();
            let k = 2.0 * vb / vv;
            for (o, vi) in out.iter_mut().zip(&v) {
                *o -= k * vi;
            }
        }
    }
}
