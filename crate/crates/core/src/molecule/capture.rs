//! Bound-state norms, capture probabilities and the asymptotic velocity law.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::bound::{capture_closed_form, require_allowed};
use super::dispersion::{eigenvalue, group_velocity, is_allowed, Branch};
use crate::coin::singlet_vector;
use crate::error::{Result, WalkError};
use crate::linalg::{cis, CVec, C64, ONE};
use crate::spectral::defect::resolvent_derivative;
use crate::symbol::{hadamard_walk, RelativeWalk, UnitaryFamily};

/// `‖Ψ‖² = ⟨ψ_Γ| −z dR/dz |ψ_Γ⟩`, doubling the grid from `start` until the
/// derivative has settled to `tol` (or `max_points` is reached). Returns the
/// value and the final doubling residual.
pub fn norm_squared(
    psi_gamma: &CVec,
    z: C64,
    family: &dyn UnitaryFamily,
    start: usize,
    tol: f64,
    max_points: usize,
) -> Result<(f64, f64)> {
    if psi_gamma.len() != family.dim() {
        return Err(WalkError::DimensionMismatch { expected: family.dim(), actual: psi_gamma.len(), context: "ψ_Γ" });
    }
    let mut n = start.max(1);
    let (dr, residual) = loop {
        let (dr, res) = resolvent_derivative(z, family, n)?;
        if res <= tol || 4 * n > max_points {
            break (dr, res);
        }
        n *= 2;
    };
    let val = -z * psi_gamma.dotc(&(&dr * psi_gamma));
    let scale = psi_gamma.norm_squared().max(f64::MIN_POSITIVE);
    if !(val.re > 0.0) || val.im.abs() > 1e-8 * val.re.abs().max(scale) {
        return Err(WalkError::Consistency(format!("‖Ψ‖² came out as {val}, not a positive real")));
    }
    Ok((val.re, residual))
}

/// `|⟨Φ|ψ₋⟩|² · P_cap` from the closed form; `Φ` is normalized internally.
pub fn capture_probability(phi: &CVec, p: f64, g: f64, branch: Branch) -> Result<f64> {
    let overlap = singlet_overlap(phi)?;
    Ok(overlap * capture_closed_form(p, g, branch)?)
}

/// `|⟨Φ|ψ₋⟩|² / ‖Ψ‖²` with the norm from [`norm_squared`] quadrature.
pub fn capture_probability_quadrature(phi: &CVec, p: f64, g: f64, branch: Branch) -> Result<f64> {
    require_allowed(p, g, branch)?;
    let overlap = singlet_overlap(phi)?;
    let rel = RelativeWalk::new_1d(&hadamard_walk(), p)?;
    let psi_gamma = singlet_vector() * (ONE - cis(g));
    let (n2, _) = norm_squared(&psi_gamma, eigenvalue(p, g, branch), &rel, 256, 1e-12, 1 << 18)?;
    Ok(overlap / n2)
}

fn singlet_overlap(phi: &CVec) -> Result<f64> {
    if phi.len() != 4 {
        return Err(WalkError::DimensionMismatch { expected: 4, actual: phi.len(), context: "collision-space state" });
    }
    let n = phi.norm_squared();
    if n == 0.0 {
        return Err(WalkError::InvalidParameter("Φ is the zero vector".into()));
    }
    Ok(singlet_vector().dotc(phi).norm_sqr() / n)
}

fn momentum_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |j| -std::f64::consts::PI + TAU * j as f64 / points as f64)
}

fn allowed_capture(p: f64, g: f64, branch: Branch) -> Option<f64> {
    is_allowed(p, g, branch).then(|| capture_closed_form(p, g, branch).ok()).flatten()
}

/// `(1/2π) ∫ dp Σ_b P_cap(p)` over allowed branches for the singlet, by the
/// periodic trapezoid rule on `grid_points` momenta.
pub fn integrated_capture(g: f64, grid_points: usize) -> f64 {
    if grid_points == 0 {
        return 0.0;
    }
    let sum: f64 = momentum_grid(grid_points)
        .map(|p| Branch::BOTH.iter().filter_map(|&b| allowed_capture(p, g, b)).sum::<f64>())
        .sum();
    sum / grid_points as f64
}

/// Density over `v ∈ [−1, 1]` on equal bins; `mass` equals
/// `integrated_capture(g, p_samples)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityHistogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub mass: f64,
}

impl VelocityHistogram {
    pub fn bin_width(&self) -> f64 {
        2.0 / self.density.len() as f64
    }

    pub fn centres(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }
}

/// Pushes `P_cap(p) dp/2π` forward through `v = dω/dp` by binning the same
/// momentum grid that [`integrated_capture`] uses.
pub fn asymptotic_distribution(g: f64, bins: usize, p_samples: usize) -> Result<VelocityHistogram> {
    if bins == 0 || p_samples == 0 {
        return Err(WalkError::InvalidParameter("bins and p_samples must be positive".into()));
    }
    let width = 2.0 / bins as f64;
    let mut weight = vec![0.0; bins];
    for p in momentum_grid(p_samples) {
        for b in Branch::BOTH {
            if let Some(w) = allowed_capture(p, g, b) {
                let v = group_velocity(p, g, b);
                let k = (((v + 1.0) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
                weight[k] += w / p_samples as f64;
            }
        }
    }
    let mass = weight.iter().sum();
    let edges = (0..=bins).map(|k| -1.0 + width * k as f64).collect();
    let density = weight.iter().map(|w| w / width).collect();
    Ok(VelocityHistogram { edges, density, mass })
}
