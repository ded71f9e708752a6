//! Small dense complex linear algebra helpers on top of nalgebra.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;

use crate::error::{Result, WalkError};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Kronecker product `a ⊗ b`, with the row index of `a` as the major index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `‖U†U − 1‖_max`.
pub fn unitarity_residual(u: &CMat) -> f64 {
    let n = u.ncols();
    let g = u.adjoint() * u;
    max_abs(&(g - CMat::identity(n, n)))
}

/// Map an angle into `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Distance between two angles measured along the circle.
pub fn circ_dist(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Eigenvalues of a square complex matrix from its Schur form (computed by faer,
/// which is an order of magnitude faster than nalgebra's Schur at ring sizes).
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(WalkError::DimensionMismatch {
            expected: n,
            actual: m.ncols(),
            context: "eigenvalues of a non-square matrix",
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 2 {
        // λ = (a + d)/2 ± √(((a − d)/2)² + bc), free of cancellation for normal matrices
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let mean = (a + d) * 0.5;
        let root = (((a - d) * 0.5).powi(2) + b * c).sqrt();
        return Ok(vec![mean + root, mean - root]);
    }
    let f = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| m[(i, j)]);
    f.eigenvalues().map_err(|_| WalkError::NoConvergence(n))
}

/// Sorted eigenphases in `(−π, π]` of a (near) unitary matrix.
pub fn eigenphases(m: &CMat) -> Result<Vec<f64>> {
    let mut w: Vec<f64> = eigenvalues(m)?.iter().map(|z| wrap_phase(z.arg())).collect();
    w.sort_by(f64::total_cmp);
    Ok(w)
}

/// Ratio of extreme singular values; infinite for a singular matrix.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = SVD::new(m.clone(), false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse via LU, refused when the condition number exceeds `max_condition`.
pub fn checked_inverse(m: &CMat, max_condition: f64) -> Result<(CMat, f64)> {
    let condition = condition_number(m);
    if !(condition <= max_condition) {
        return Err(WalkError::SingularDefect { condition });
    }
    let inv = m.clone().try_inverse().ok_or(WalkError::SingularDefect { condition })?;
    Ok((inv, condition))
}

/// Closest unitary in Frobenius norm (the unitary polar factor).
pub fn nearest_unitary(m: &CMat) -> CMat {
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}

/// Determinant and adjugate of a small matrix; `adj · m = det · 1`.
///
/// Cofactors are expanded through LU determinants of the minors, which is
/// adequate for the 4x4 collision spaces this is used on.
pub fn adjugate(m: &CMat) -> CMat {
    let n = m.nrows();
    if n == 1 {
        return CMat::from_element(1, 1, ONE);
    }
    CMat::from_fn(n, n, |i, j| {
        let minor = m.clone().remove_row(j).remove_column(i);
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        minor.determinant() * sign
    })
}

/// Right singular vector belonging to the smallest singular value, and that value.
pub fn smallest_singular_pair(m: &CMat) -> (f64, CVec) {
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (idx, s) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    (s, v_t.row(idx).adjoint())
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
