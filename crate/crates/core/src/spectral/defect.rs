//! The integrated resolvent `R(z) = (2π)^{−s} ∫ (W(k) − z)^{−1} W(k) dk` and
//! coins synthesized from it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::UnitaryCoin;
use crate::error::{Result, WalkError};
use crate::linalg::{checked_inverse, max_abs, nearest_unitary, unitarity_residual, CMat, C64};
use crate::symbol::UnitaryFamily;

/// Closest the spectral parameter may come to an eigenvalue on the grid.
pub const MIN_SPECTRAL_DISTANCE: f64 = 1e-6;
/// Largest condition number of `R(z)` that will be inverted.
pub const MAX_DEFECT_CONDITION: f64 = 1e12;
/// Allowed deviation from unitarity of `1 − R⁻¹` before projection.
pub const DEFECT_UNITARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DefectOperator {
    pub z: C64,
    pub matrix: CMat,
    /// Max-entry difference between the `N` and `2N` grid results.
    pub quadrature_residual: f64,
    /// Points per axis of the finer grid actually returned.
    pub grid_points: usize,
}

impl DefectOperator {
    /// Wraps a given matrix, for synthetic checks.
    pub fn from_matrix(z: C64, matrix: CMat) -> Self {
        Self { z, matrix, quadrature_residual: 0.0, grid_points: 0 }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `‖R + R† − 1‖_max`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim();
        max_abs(&(&self.matrix + self.matrix.adjoint() - CMat::identity(n, n)))
    }
}

/// Midpoints `−π + (j + ½) 2π/N`, which avoid `k = π` exactly.
pub fn midpoint_grid(n: usize) -> Vec<f64> {
    let h = std::f64::consts::TAU / n as f64;
    (0..n).map(|j| -std::f64::consts::PI + (j as f64 + 0.5) * h).collect()
}

fn grid_point(axis: &[f64], s: usize, mut idx: usize) -> Vec<f64> {
    let n = axis.len();
    let mut k = vec![0.0; s];
    for slot in k.iter_mut().rev() {
        *slot = axis[idx % n];
        idx /= n;
    }
    k
}

/// Which integrand the quadrature evaluates.
#[derive(Debug, Clone, Copy)]
enum Integrand {
    /// `(W − z)⁻¹ W`
    Resolvent,
    /// `(W − z)⁻² W`, the `z`-derivative of the above.
    Derivative,
}

fn quadrature(family: &dyn UnitaryFamily, z: C64, n: usize, which: Integrand) -> Result<CMat> {
    let s = family.lattice_dim();
    let d = family.dim();
    let axis = midpoint_grid(n);
    let total =
        n.checked_pow(s as u32).ok_or_else(|| WalkError::InvalidParameter("quadrature grid too large".into()))?;
    let id = CMat::identity(d, d);
    let sum = (0..total)
        .into_par_iter()
        .map(|idx| {
            let k = grid_point(&axis, s, idx);
            let w = family.eval(&k);
            let shifted = &w - &id * z;
            // W is normal, so σ_min(W − z) is the distance from z to its spectrum.
            let sv = shifted.clone().svd(false, false).singular_values;
            let distance = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(distance >= MIN_SPECTRAL_DISTANCE) {
                return Err(WalkError::SpectralProximity { distance, minimum: MIN_SPECTRAL_DISTANCE });
            }
            let lu = shifted.lu();
            let x = lu.solve(&w).ok_or(WalkError::SpectralProximity { distance, minimum: MIN_SPECTRAL_DISTANCE })?;
            Ok(match which {
                Integrand::Resolvent => x,
                Integrand::Derivative => lu.solve(&x).expect("same factorization succeeded above"),
            })
        })
        .try_reduce(|| CMat::zeros(d, d), |a, b| Ok(a + b))?;
    Ok(sum / C64::new(total as f64, 0.0))
}

fn refined(family: &dyn UnitaryFamily, z: C64, n: usize, which: Integrand) -> Result<(CMat, f64)> {
    if n == 0 {
        return Err(WalkError::InvalidParameter("quadrature needs at least one grid point".into()));
    }
    let coarse = quadrature(family, z, n, which)?;
    let fine = quadrature(family, z, 2 * n, which)?;
    let residual = max_abs(&(&fine - &coarse));
    Ok((fine, residual))
}

/// `R(z)` by midpoint quadrature on `grid_points` and `2·grid_points` points
/// per axis; the finer result is returned with the difference as residual.
pub fn compute_r(z: C64, family: &dyn UnitaryFamily, grid_points: usize) -> Result<DefectOperator> {
    let (matrix, quadrature_residual) = refined(family, z, grid_points, Integrand::Resolvent)?;
    Ok(DefectOperator { z, matrix, quadrature_residual, grid_points: 2 * grid_points })
}

/// Doubles the grid from `start` until the residual is at most `tol` or
/// `max_points` per axis is reached.
pub fn compute_r_converged(
    z: C64,
    family: &dyn UnitaryFamily,
    start: usize,
    tol: f64,
    max_points: usize,
) -> Result<DefectOperator> {
    let mut n = start.max(1);
    loop {
        let r = compute_r(z, family, n)?;
        if r.quadrature_residual <= tol || 2 * r.grid_points > max_points {
            return Ok(r);
        }
        n *= 2;
    }
}

/// `dR/dz = ∫ (W − z)⁻² W`, with the same doubling residual.
pub fn resolvent_derivative(z: C64, family: &dyn UnitaryFamily, grid_points: usize) -> Result<(CMat, f64)> {
    refined(family, z, grid_points, Integrand::Derivative)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub hermitian_residual: f64,
    /// `‖U†U − 1‖_max` for `U = 1 − R⁻¹`; infinite when `R` is singular.
    pub unitarity_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Checks `R + R† = 1` and unitarity of `1 − R⁻¹` against
/// `max(1e-9, 10·quadrature residual)`.
pub fn check_unitarity_lemma(r: &DefectOperator) -> LemmaReport {
    let hermitian_residual = r.hermitian_residual();
    let n = r.dim();
    let unitarity_residual = match r.matrix.clone().try_inverse() {
        Some(inv) => unitarity_residual(&(CMat::identity(n, n) - inv)),
        None => f64::INFINITY,
    };
    let threshold = DEFECT_UNITARITY_TOL.max(10.0 * r.quadrature_residual);
    LemmaReport {
        hermitian_residual,
        unitarity_residual,
        threshold,
        passed: hermitian_residual <= threshold && unitarity_residual <= threshold,
    }
}

#[derive(Debug, Clone)]
pub struct DefectSynthesis {
    pub coin: UnitaryCoin,
    pub condition_number: f64,
    /// Unitarity residual of `1 − R⁻¹` before projecting onto the unitaries.
    pub raw_unitarity_residual: f64,
}

/// `Γ = 1 − R(z)⁻¹`. The raw result must be unitary to `1e-9`; it is then
/// replaced by its unitary polar factor so the coin invariant holds exactly.
pub fn defect_coin_for(r: &DefectOperator) -> Result<DefectSynthesis> {
    let n = r.dim();
    let (inv, condition_number) = checked_inverse(&r.matrix, MAX_DEFECT_CONDITION)?;
    let raw = CMat::identity(n, n) - inv;
    let raw_unitarity_residual = unitarity_residual(&raw);
    let tolerance = DEFECT_UNITARITY_TOL.max(10.0 * r.quadrature_residual);
    if raw_unitarity_residual > tolerance {
        return Err(WalkError::NotUnitary { residual: raw_unitarity_residual, tolerance });
    }
    let coin = UnitaryCoin::new(nearest_unitary(&raw))?;
    Ok(DefectSynthesis { coin, condition_number, raw_unitarity_residual })
}
