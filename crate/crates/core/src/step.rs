//! The interacting two-particle step `W_Γ = (W₁ ⊗ W₁)((1 − N) + ΓN)`.

use crate::coin::UnitaryCoin;
use crate::error::{Result, WalkError};
use crate::linalg::{CMat, C64, ZERO};
use crate::state::{Lattice, TwoParticleState};
use crate::symbol::WalkSymbol;

/// Largest ring for which a dense step matrix may be materialized.
pub const DENSE_MAX_SITES: usize = 16;

/// One time step: the collision coin `Γ` on coinciding sites, then each
/// particle moves with the single-particle walk.
#[derive(Debug, Clone)]
pub struct StepOperator {
    terms: Vec<(i64, CMat)>,
    d: usize,
    range: usize,
    gamma: UnitaryCoin,
    lattice: Lattice,
}

pub fn build_interacting_step(w: &WalkSymbol, gamma_coin: &UnitaryCoin, lattice: Lattice) -> Result<StepOperator> {
    let terms = w.terms_1d()?;
    let d = w.coin_dim();
    if gamma_coin.dim() != d * d {
        return Err(WalkError::DimensionMismatch {
            expected: d * d,
            actual: gamma_coin.dim(),
            context: "collision coin must act on the d² collision space",
        });
    }
    if let Lattice::Ring { size } = lattice {
        if size == 0 {
            return Err(WalkError::InvalidParameter("ring needs at least one site".into()));
        }
    }
    Ok(StepOperator { terms, d, range: w.neighborhood_size(), gamma: gamma_coin.clone(), lattice })
}

/// The non-interacting step, `Γ = 1`.
pub fn build_free_step(w: &WalkSymbol, lattice: Lattice) -> Result<StepOperator> {
    let d = w.coin_dim();
    build_interacting_step(w, &UnitaryCoin::identity(d * d), lattice)
}

impl StepOperator {
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn coin_dim(&self) -> usize {
        self.d
    }

    pub fn gamma(&self) -> &UnitaryCoin {
        &self.gamma
    }

    /// Sites a particle can move per step.
    pub fn range(&self) -> usize {
        self.range
    }

    pub fn apply(&self, state: &TwoParticleState) -> Result<TwoParticleState> {
        if state.lattice() != self.lattice || state.coin_dim() != self.d {
            return Err(WalkError::InvalidParameter("state does not match the step's lattice or coin".into()));
        }
        if let Lattice::Window { radius } = self.lattice {
            self.check_boundary_band(state, radius)?;
        }
        let mut psi = state.clone();
        self.apply_collision(&mut psi);
        let psi = self.move_particle(&psi, true);
        Ok(self.move_particle(&psi, false))
    }

    fn check_boundary_band(&self, state: &TwoParticleState, radius: usize) -> Result<()> {
        let n = state.sites();
        let inner = radius.saturating_sub(self.range) as i64;
        for i1 in 0..n {
            for i2 in 0..n {
                let (x1, x2) = (self.lattice.coord(i1), self.lattice.coord(i2));
                if (x1.abs() > inner || x2.abs() > inner) && state.block(i1, i2).iter().any(|z| *z != ZERO) {
                    let site = if x1.abs() > inner { x1 } else { x2 };
                    return Err(WalkError::AmplitudeAtBoundary { site });
                }
            }
        }
        Ok(())
    }

    fn apply_collision(&self, psi: &mut TwoParticleState) {
        let dd = self.d * self.d;
        let g = self.gamma.matrix();
        let mut buf = vec![ZERO; dd];
        for i in 0..psi.sites() {
            let v = psi.block_mut(i, i);
            if v.iter().all(|z| *z == ZERO) {
                continue;
            }
            for (r, out) in buf.iter_mut().enumerate() {
                *out = (0..dd).map(|c| g[(r, c)] * v[c]).sum();
            }
            v.copy_from_slice(&buf);
        }
    }

    /// Applies `Σ_n A_n T_n` to the first (or second) particle.
    fn move_particle(&self, psi: &TwoParticleState, first: bool) -> TwoParticleState {
        let n = psi.sites();
        let d = self.d;
        let mut out = TwoParticleState::zeros(psi.lattice(), d);
        for i1 in 0..n {
            for i2 in 0..n {
                let src = psi.block(i1, i2);
                if src.iter().all(|z| *z == ZERO) {
                    continue;
                }
                let moving = if first { i1 } else { i2 };
                let x = self.lattice.coord(moving);
                for (shift, a) in &self.terms {
                    let Some(j) = self.lattice.index(x + shift) else { continue };
                    let (j1, j2) = if first { (j, i2) } else { (i1, j) };
                    let dst = out.block_mut(j1, j2);
                    for p in 0..d {
                        for q in 0..d {
                            let mut acc = ZERO;
                            for r in 0..d {
                                acc += if first { a[(p, r)] * src[r * d + q] } else { a[(q, r)] * src[p * d + r] };
                            }
                            dst[p * d + q] += acc;
                        }
                    }
                }
            }
        }
        out
    }

    /// Dense matrix of the step, in the state's storage order. Only for rings
    /// of at most [`DENSE_MAX_SITES`] sites.
    pub fn dense_matrix(&self) -> Result<CMat> {
        let Lattice::Ring { size } = self.lattice else {
            return Err(WalkError::InvalidParameter("dense step matrices are built on rings only".into()));
        };
        if size > DENSE_MAX_SITES {
            return Err(WalkError::InvalidParameter(format!(
                "dense step matrix refused for ring of {size} sites (max {DENSE_MAX_SITES})"
            )));
        }
        let dim = size * size * self.d * self.d;
        let mut m = CMat::zeros(dim, dim);
        for col in 0..dim {
            let mut e = TwoParticleState::zeros(self.lattice, self.d);
            e.amplitudes_mut()[col] = C64::new(1.0, 0.0);
            let img = self.apply(&e)?;
            for (row, v) in img.amplitudes().iter().enumerate() {
                m[(row, col)] = *v;
            }
        }
        Ok(m)
    }
}

/// Applies `step` `t` times. On a window the initial support plus `t` times
/// the step range must fit inside the radius, checked before any work.
pub fn evolve(state: &TwoParticleState, step: &StepOperator, t: usize) -> Result<TwoParticleState> {
    if let Lattice::Window { radius } = step.lattice() {
        let required = state.support_radius() + t * step.range();
        if required > radius {
            return Err(WalkError::ClearanceViolated { required, available: radius });
        }
    }
    let mut psi = state.clone();
    for _ in 0..t {
        psi = step.apply(&psi)?;
    }
    Ok(psi)
}

/// Single-particle evolution on a ring of `m` sites; `psi` is indexed `x·d + α`.
pub fn evolve_single_ring(w: &WalkSymbol, m: usize, psi: &[C64], t: usize) -> Result<Vec<C64>> {
    let terms = w.terms_1d()?;
    let d = w.coin_dim();
    if psi.len() != m * d {
        return Err(WalkError::DimensionMismatch {
            expected: m * d,
            actual: psi.len(),
            context: "single-particle state",
        });
    }
    let mut cur = psi.to_vec();
    for _ in 0..t {
        let mut next = vec![ZERO; m * d];
        for x in 0..m {
            for (n, a) in &terms {
                let y = (x as i64 + n).rem_euclid(m as i64) as usize;
                for p in 0..d {
                    next[y * d + p] += (0..d).map(|q| a[(p, q)] * cur[x * d + q]).sum::<C64>();
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}
