//! Closed-form bound states: `η`, the pole `v₁`, capture probability and the
//! amplitudes in the relative coordinate.

use serde::{Deserialize, Serialize};

use super::dispersion::{constraint, eigenvalue, is_allowed, omega, Branch, CONSTRAINT_TIE};
use crate::coin::{singlet_vector, swap_operator, UnitaryCoin};
use crate::error::{Result, WalkError};
use crate::linalg::{adjugate, cis, CMat, CVec, C64, ONE, ZERO};
use crate::spectral::eigvec::line_residual;
use crate::state::{Lattice, TwoParticleState};
use crate::symbol::{hadamard_walk, RelativeWalk, UnitaryFamily};

/// `cos η = cos p − 2cos ω`, with `sign(sin η) = sign(sin ω)` and, when
/// `sin ω = 0`, `sign(sin(g − ω))`. On allowed branches this is the angle
/// with `e^{iη} = −e^{iω}/γ`.
pub fn eta(p: f64, omega: f64, g: f64) -> Result<f64> {
    let c = p.cos() - 2.0 * omega.cos();
    if c.abs() > 1.0 + 1e-12 {
        return Err(WalkError::Domain(format!("cos η = {c} lies outside [-1, 1]")));
    }
    let base = c.clamp(-1.0, 1.0).acos();
    let s = omega.sin();
    let sign = if s != 0.0 { s.signum() } else { (g - omega).sin().signum() };
    Ok(sign * base)
}

/// `v₁ = −cos η − cot(g/2) sin η`, the decay factor per relative step.
pub fn pole_v1(p: f64, g: f64, branch: Branch) -> Result<C64> {
    let half = (g / 2.0).sin();
    if half.abs() < 1e-15 {
        return Err(WalkError::InvalidParameter("g = 0 has no bound state and no pole".into()));
    }
    let w = omega(p, g, branch);
    let e = eta(p, w, g)?;
    Ok(C64::new(-e.cos() - (g / 2.0).cos() / half * e.sin(), 0.0))
}

/// `1 + 2 sin ω / sin η`, the squared norm of the eigenvector with `Ψ₀ = ψ₋`.
pub fn singlet_norm_squared(p: f64, g: f64, branch: Branch) -> Result<f64> {
    require_allowed(p, g, branch)?;
    let w = omega(p, g, branch);
    let e = eta(p, w, g)?;
    Ok(1.0 + 2.0 * w.sin() / e.sin())
}

/// `P_cap = (1 + 2 sin ω / sin η)⁻¹` for the singlet initial state.
pub fn capture_closed_form(p: f64, g: f64, branch: Branch) -> Result<f64> {
    Ok(1.0 / singlet_norm_squared(p, g, branch)?)
}

pub(crate) fn require_allowed(p: f64, g: f64, branch: Branch) -> Result<()> {
    if is_allowed(p, g, branch) {
        return Ok(());
    }
    let w = omega(p, g, branch);
    Err(WalkError::ForbiddenBranch { branch: branch.label(), p, g, constraint: constraint(w, g) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateRecord {
    pub p: f64,
    pub g: f64,
    pub branch: Branch,
    pub omega: f64,
    pub eta: f64,
    pub v1: C64,
    pub p_cap: f64,
    pub cutoff: usize,
    /// Relative sites `j = −X..=X`; site `j` is the separation `x₁ − x₂ = 2j`.
    pub sites: Vec<i64>,
    /// Normalized collision-space amplitudes `Ψ̃_j`, indexed like `sites`.
    pub amplitudes: Vec<Vec<C64>>,
    /// `‖W_Γ Ψ̃ − e^{iω}Ψ̃‖/‖Ψ̃‖` of the truncated table on the infinite line.
    pub eigen_residual: f64,
}

impl BoundStateRecord {
    pub fn amplitude(&self, j: i64) -> Option<&[C64]> {
        let idx = j + self.cutoff as i64;
        (idx >= 0).then(|| self.amplitudes.get(idx as usize).map(|v| v.as_slice())).flatten()
    }

    pub fn amplitude_norm(&self, j: i64) -> f64 {
        self.amplitude(j).map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).unwrap_or(0.0)
    }

    /// Places the molecule on a ring of `m` sites at its total momentum,
    /// `Ψ(x₁, x₂) = e^{−ip(x₁+x₂)/2} Ψ̃(x₁ − x₂)`, normalized. Needs
    /// `p = 2πn/m` and the table to fit inside half the ring.
    pub fn embed_on_ring(&self, m: usize) -> Result<TwoParticleState> {
        let n = self.p * m as f64 / std::f64::consts::TAU;
        if (n - n.round()).abs() > 1e-9 {
            return Err(WalkError::InvalidParameter(format!(
                "p = {} is not a momentum of a ring of {m} sites",
                self.p
            )));
        }
        if 4 * self.cutoff >= m {
            return Err(WalkError::InvalidParameter(format!(
                "cutoff {} does not fit a ring of {m} sites",
                self.cutoff
            )));
        }
        let lat = Lattice::ring(m);
        let mut state = TwoParticleState::zeros(lat, 2);
        for x2 in 0..m as i64 {
            for (&j, amp) in self.sites.iter().zip(&self.amplitudes) {
                let y = 2 * j;
                let phase = cis(-self.p * (2 * x2 + y) as f64 / 2.0);
                let v: Vec<C64> = amp.iter().map(|a| a * phase).collect();
                state.set_block(x2 + y, x2, &v)?;
            }
        }
        state.normalize()?;
        Ok(state)
    }
}

/// Coefficients `c₀, c₁, c₂, …` of a Laurent polynomial sampled at the 16th
/// roots of unity; entries 3..16 carry aliased negative and high powers.
fn unit_circle_coefficients<F: Fn(C64) -> C64>(f: F) -> [C64; 16] {
    let n = 16;
    let samples: Vec<C64> = (0..n).map(|l| f(cis(std::f64::consts::TAU * l as f64 / n as f64))).collect();
    std::array::from_fn(|k| {
        samples
            .iter()
            .enumerate()
            .map(|(l, s)| s * cis(-std::f64::consts::TAU * (k * l) as f64 / n as f64))
            .sum::<C64>()
            / n as f64
    })
}

/// Builds the analytic eigenvector. For `j < 0` the residue at the pole gives
/// `Ψ_j = z v₁^{|j|−1} N(v₁) ψ_Γ / p'(v₁)` with `N(v) = v·adj(W(v) − z)`,
/// `p(v) = v·det(W(v) − z)` and `ψ_Γ = (1 − γ)ψ₋`; `Ψ₀ = ψ₋` and
/// `Ψ_j = −FΨ_{−j}` for `j > 0`. The table is scaled by `√P_cap` so that its
/// full (untruncated) norm is one.
pub fn bound_state(p: f64, g: f64, branch: Branch, cutoff: usize) -> Result<BoundStateRecord> {
    require_allowed(p, g, branch)?;
    let z = eigenvalue(p, g, branch);
    let w = omega(p, g, branch);
    let e = eta(p, w, g)?;
    let gamma = cis(g);
    let rel = RelativeWalk::new_1d(&hadamard_walk(), p)?;
    let id = CMat::identity(4, 4);
    let m_of = |v: C64| rel.eval(&[v.arg()]) - &id * z;

    let det_coef = unit_circle_coefficients(|v| v * m_of(v).determinant());
    let scale = det_coef.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if det_coef[3..].iter().any(|c| c.norm() > 1e-12 * scale.max(1.0)) {
        return Err(WalkError::Consistency("v·det(W(v) − z) is not a quadratic polynomial".into()));
    }
    let (c0, c1, c2) = (det_coef[0], det_coef[1], det_coef[2]);
    let v1 = inner_root(c0, c1, c2)?;
    let closed = pole_v1(p, g, branch)?;
    if (v1 - closed).norm() > 1e-8 {
        return Err(WalkError::Consistency(format!("pole {v1} disagrees with closed form {closed}")));
    }
    let dp = c1 + c2 * v1 * 2.0;

    let adj_coef: Vec<[C64; 16]> =
        (0..16).map(|idx| unit_circle_coefficients(|v| v * adjugate(&m_of(v))[(idx / 4, idx % 4)])).collect();
    let n_at_v1 = CMat::from_fn(4, 4, |r, c| {
        let co = &adj_coef[r * 4 + c];
        co[0] + co[1] * v1 + co[2] * v1 * v1
    });

    let psi_minus = singlet_vector();
    let psi_gamma = &psi_minus * (ONE - gamma);
    let head = &n_at_v1 * &psi_gamma * (z / dp);

    let norm_sq = 1.0 + 2.0 * w.sin() / e.sin();
    let geometric = 1.0 + 2.0 * head.norm_squared() / (1.0 - v1.norm_sqr());
    if (geometric - norm_sq).abs() > 1e-8 * norm_sq {
        return Err(WalkError::Consistency(format!(
            "amplitude norm {geometric} disagrees with 1 + 2 sin ω / sin η = {norm_sq}"
        )));
    }
    let p_cap = 1.0 / norm_sq;
    let amp_scale = C64::new(p_cap.sqrt(), 0.0);

    let f = swap_operator(2);
    let x = cutoff as i64;
    let sites: Vec<i64> = (-x..=x).collect();
    let left = |j: i64| -> CVec { &head * v1.powi((j.unsigned_abs() - 1) as i32) };
    let table: Vec<CVec> = sites
        .iter()
        .map(|&j| match j.signum() {
            -1 => left(j),
            0 => psi_minus.clone(),
            _ => -(&f * left(-j)),
        })
        .map(|v| v * amp_scale)
        .collect();

    let coin = UnitaryCoin::singlet_phase(gamma)?;
    let eigen_residual = line_residual(&rel, &coin, &table, z)?;
    let amplitudes = table.iter().map(|v| v.iter().cloned().collect()).collect();
    Ok(BoundStateRecord { p, g, branch, omega: w, eta: e, v1, p_cap, cutoff, sites, amplitudes, eigen_residual })
}

/// The root of `c₀ + c₁v + c₂v²` strictly inside the unit disk.
fn inner_root(c0: C64, c1: C64, c2: C64) -> Result<C64> {
    let roots: Vec<C64> = if c2.norm() < 1e-14 * (c0.norm() + c1.norm()) {
        vec![-c0 / c1]
    } else {
        let disc = (c1 * c1 - c0 * c2 * 4.0).sqrt();
        let q = if (c1.conj() * disc).re >= 0.0 { -(c1 + disc) / 2.0 } else { -(c1 - disc) / 2.0 };
        let mut r = vec![q / c2];
        r.push(if q == ZERO { ZERO } else { c0 / q });
        r
    };
    let inside: Vec<C64> = roots.into_iter().filter(|r| r.norm() < 1.0 - CONSTRAINT_TIE).collect();
    match inside.as_slice() {
        [v] => Ok(*v),
        _ => Err(WalkError::Consistency(format!("expected one pole inside the unit disk, found {}", inside.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::dispersion::omega;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn eta_examples() {
        let e = eta(FRAC_PI_2, FRAC_PI_2, PI).unwrap();
        assert!((e - FRAC_PI_2).abs() < 1e-12);
        let w = (1.0f64 / 3.0).acos();
        let e = eta(0.0, w, PI).unwrap();
        assert!((e.cos() - 1.0 / 3.0).abs() < 1e-12);
        assert!((e.sin() - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(matches!(eta(0.0, PI, 1.0), Err(WalkError::Domain(_))));
    }

    #[test]
    fn pole_examples() {
        assert!((pole_v1(0.0, PI, Branch::Plus).unwrap() + C64::new(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!(pole_v1(FRAC_PI_2, PI, Branch::Plus).unwrap().norm() < 1e-12);
        assert!(pole_v1(0.3, 0.0, Branch::Plus).is_err());
    }

    #[test]
    fn capture_at_g_pi() {
        assert!((capture_closed_form(FRAC_PI_2, PI, Branch::Plus).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((capture_closed_form(FRAC_PI_2, PI, Branch::Minus).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn strictly_localized_record() {
        let r = bound_state(FRAC_PI_2, PI, Branch::Plus, 5).unwrap();
        for j in -5i64..=5 {
            if j.abs() > 1 {
                assert!(r.amplitude_norm(j) < 1e-14);
            } else {
                assert!(r.amplitude_norm(j) > 0.1);
            }
        }
        let total: f64 = (-5..=5).map(|j| r.amplitude_norm(j).powi(2)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(r.eigen_residual < 1e-12);
    }

    #[test]
    fn tail_ratio_one_third() {
        let r = bound_state(0.0, PI, Branch::Plus, 12).unwrap();
        for x in 1..=8 {
            let ratio = r.amplitude_norm(x + 1) / r.amplitude_norm(x);
            assert!((ratio - 1.0 / 3.0).abs() < 1e-8);
        }
    }

    #[test]
    fn forbidden_branch_rejected() {
        // at g = 0.3 the minus branch is forbidden somewhere; find one
        let g = 0.3;
        let p = (0..100).map(|i| -PI + 0.0628 * i as f64).find(|&p| !is_allowed(p, g, Branch::Minus)).unwrap();
        assert!(matches!(bound_state(p, g, Branch::Minus, 4), Err(WalkError::ForbiddenBranch { .. })));
        let _ = omega(p, g, Branch::Minus);
    }
}
