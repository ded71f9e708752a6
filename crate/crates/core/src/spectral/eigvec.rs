//! Bound-state eigenvectors reconstructed from their value at the defect.

use rayon::prelude::*;

use super::defect::{compute_r_converged, midpoint_grid, MIN_SPECTRAL_DISTANCE};
use crate::coin::UnitaryCoin;
use crate::error::{Result, WalkError};
use crate::linalg::{cis, CMat, CVec, C64};
use crate::symbol::{RelativeWalk, UnitaryFamily};

/// Relative tolerance on `R(z)(1 − Γ)ψ = ψ`.
pub const EIGENCONDITION_TOL: f64 = 1e-8;

/// Amplitudes on compressed relative sites `−X..=X`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectEigenvector {
    pub cutoff: usize,
    pub amplitudes: Vec<CVec>,
    pub eigencondition_residual: f64,
    pub grid_points: usize,
}

impl DefectEigenvector {
    pub fn at(&self, j: i64) -> Option<&CVec> {
        let idx = j + self.cutoff as i64;
        (idx >= 0).then(|| self.amplitudes.get(idx as usize)).flatten()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|v| v.norm_squared()).sum()
    }
}

/// `Ψ_j = ∫ e^{−iκj} (W(κ) − z)⁻¹ W(κ)(1 − Γ)ψ dκ/2π` for `|j| ≤ X` on a
/// one-dimensional relative walk. The grid is doubled until the amplitudes
/// stop changing.
pub fn eigenvector_from_defect(
    psi: &CVec,
    z: C64,
    rel: &RelativeWalk,
    gamma: &UnitaryCoin,
    cutoff: usize,
) -> Result<DefectEigenvector> {
    let dd = rel.dim();
    if rel.lattice_dim() != 1 {
        return Err(WalkError::InvalidParameter(
            "eigenvector reconstruction needs a one-dimensional relative walk".into(),
        ));
    }
    if psi.len() != dd || gamma.dim() != dd {
        return Err(WalkError::DimensionMismatch { expected: dd, actual: psi.len(), context: "defect-space vector" });
    }
    let id = CMat::identity(dd, dd);
    let source = (&id - gamma.matrix()) * psi;
    let r = compute_r_converged(z, rel, 256, 1e-13, 1 << 16)?;
    let eigencondition_residual = (&r.matrix * &source - psi).norm() / psi.norm();
    if !(eigencondition_residual <= EIGENCONDITION_TOL) {
        return Err(WalkError::Consistency(format!(
            "eigenvalue condition R(z)(1-Γ)ψ = ψ fails by {eigencondition_residual:.3e}"
        )));
    }

    let mut n = (4 * cutoff + 4).next_power_of_two().max(256);
    let mut prev = fourier_amplitudes(rel, z, &source, cutoff, n)?;
    loop {
        n *= 2;
        let next = fourier_amplitudes(rel, z, &source, cutoff, n)?;
        let change = prev.iter().zip(&next).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prev = next;
        if change <= 1e-14 || n >= 1 << 16 {
            break;
        }
    }
    Ok(DefectEigenvector { cutoff, amplitudes: prev, eigencondition_residual, grid_points: n })
}

fn fourier_amplitudes(rel: &RelativeWalk, z: C64, source: &CVec, cutoff: usize, n: usize) -> Result<Vec<CVec>> {
    let dd = rel.dim();
    let id = CMat::identity(dd, dd);
    let grid = midpoint_grid(n);
    let values: Vec<CVec> = grid
        .par_iter()
        .map(|&k| {
            let w = rel.eval(&[k]);
            let lu = (&w - &id * z).lu();
            lu.solve(&(&w * source))
                .ok_or(WalkError::SpectralProximity { distance: 0.0, minimum: MIN_SPECTRAL_DISTANCE })
        })
        .collect::<Result<_>>()?;
    let x = cutoff as i64;
    Ok((-x..=x)
        .map(|j| {
            let mut acc = CVec::zeros(dd);
            for (k, v) in grid.iter().zip(&values) {
                acc += v * cis(-k * j as f64);
            }
            acc / C64::new(n as f64, 0.0)
        })
        .collect())
}

/// `‖W_Γ Ψ − zΨ‖ / ‖Ψ‖` on the infinite line, with `Ψ` zero outside `−X..=X`
/// and `Γ` at the origin.
pub fn line_residual(rel: &RelativeWalk, gamma: &UnitaryCoin, amplitudes: &[CVec], z: C64) -> Result<f64> {
    let sym = rel.symbol();
    let x = (amplitudes.len() / 2) as i64;
    if amplitudes.len() % 2 != 1 {
        return Err(WalkError::InvalidParameter("amplitude table must be centred".into()));
    }
    let reach = sym.neighborhood_size() as i64;
    let get = |j: i64| -> Option<CVec> {
        let idx = j + x;
        (0..amplitudes.len() as i64).contains(&idx).then(|| {
            let v = amplitudes[idx as usize].clone();
            if j == 0 {
                gamma.matrix() * v
            } else {
                v
            }
        })
    };
    let mut err = 0.0;
    for y in -x - reach..=x + reach {
        let mut acc = CVec::zeros(sym.coin_dim());
        for (kappa, coef) in sym.terms() {
            if let Some(v) = get(y - kappa[0]) {
                acc += coef * v;
            }
        }
        if let Some(v) = get(y).map(|_| amplitudes[(y + x) as usize].clone()) {
            acc -= v * z;
        }
        err += acc.norm_squared();
    }
    let norm: f64 = amplitudes.iter().map(|v| v.norm_squared()).sum();
    Ok((err / norm).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::singlet_vector;
    use crate::symbol::hadamard_walk;
    use std::f64::consts::PI;

    #[test]
    fn strictly_localized_at_half_pi() {
        let rel = RelativeWalk::new_1d(&hadamard_walk(), PI / 2.0).unwrap();
        let g = UnitaryCoin::singlet_phase(C64::new(-1.0, 0.0)).unwrap();
        let v = eigenvector_from_defect(&singlet_vector(), cis(PI / 2.0), &rel, &g, 6).unwrap();
        for j in -6i64..=6 {
            let n = v.at(j).unwrap().norm();
            if j.abs() > 1 {
                assert!(n < 1e-13, "j={j} {n}");
            }
        }
        assert!(v.at(1).unwrap().norm() > 0.1);
        assert!(line_residual(&rel, &g, &v.amplitudes, cis(PI / 2.0)).unwrap() < 1e-12);
    }

    #[test]
    fn wrong_eigenvalue_is_rejected() {
        let rel = RelativeWalk::new_1d(&hadamard_walk(), PI / 2.0).unwrap();
        let g = UnitaryCoin::singlet_phase(C64::new(-1.0, 0.0)).unwrap();
        let r = eigenvector_from_defect(&singlet_vector(), cis(0.4 * PI), &rel, &g, 4);
        assert!(matches!(r, Err(WalkError::Consistency(_))));
    }
}
