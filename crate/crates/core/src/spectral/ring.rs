//! Dense relative-coordinate blocks of the interacting walk on finite rings.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::band::BandSample;
use super::defect::midpoint_grid;
use crate::coin::UnitaryCoin;
use crate::error::{Result, WalkError};
use crate::linalg::{cis, eigenphases, kron, wrap_phase, CMat, C64, ZERO};
use crate::symbol::{RelativeWalk, WalkSymbol};

/// Relative-momentum grid used to sample the free band at each total momentum.
pub const BAND_GRID: usize = 4096;

/// Block of `W_Γ` at total momentum `p` on a ring of `m` sites.
///
/// States of momentum `p` are written `Ψ(x₁, x₂) = e^{−ipx₂} φ(x₁ − x₂)`, so
/// `φ'(y) = Σ_{n,m} e^{ipm} (A_n ⊗ A_m) [Γφ](y − n + m)` with `Γ` applied at
/// `y = 0`. This is periodic in `y` for every `p = 2πj/M`.
pub fn ring_block(m: usize, w: &WalkSymbol, gamma: &UnitaryCoin, p: f64) -> Result<CMat> {
    let terms = w.terms_1d()?;
    let d = w.coin_dim();
    let dd = d * d;
    if gamma.dim() != dd {
        return Err(WalkError::DimensionMismatch { expected: dd, actual: gamma.dim(), context: "collision coin" });
    }
    let mut b = CMat::zeros(m * dd, m * dd);
    for (n1, a1) in &terms {
        for (n2, a2) in &terms {
            let k = kron(a1, a2) * cis(p * *n2 as f64);
            let k_origin = &k * gamma.matrix();
            let shift = n1 - n2;
            for y in 0..m {
                let src = (y as i64 - shift).rem_euclid(m as i64) as usize;
                let blk = if src == 0 { &k_origin } else { &k };
                let mut view = b.view_mut((y * dd, src * dd), (dd, dd));
                view += blk;
            }
        }
    }
    Ok(b)
}

/// Splits a ring block into the decoupled relative sublattices.
///
/// When every relative displacement `n₁ − n₂` is a multiple of `s` and `s`
/// divides `m`, sites `y ≡ r (mod s)` never mix, so the block is a direct sum
/// of `s` principal sub-blocks. Otherwise the block is returned whole.
pub fn sublattice_blocks(block: &CMat, m: usize, w: &WalkSymbol) -> Result<Vec<CMat>> {
    let terms = w.terms_1d()?;
    let s = terms
        .iter()
        .flat_map(|(a, _)| terms.iter().map(move |(b, _)| (a - b).unsigned_abs() as usize))
        .fold(0, gcd_usize)
        .max(1);
    if s == 1 || !m.is_multiple_of(s) {
        return Ok(vec![block.clone()]);
    }
    let dd = block.nrows() / m;
    Ok((0..s)
        .map(|r| {
            let idx: Vec<usize> = (r..m).step_by(s).flat_map(|y| (0..dd).map(move |a| y * dd + a)).collect();
            CMat::from_fn(idx.len(), idx.len(), |i, j| block[(idx[i], idx[j])])
        })
        .collect())
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub p: f64,
    /// Sorted, in `(−π, π]`.
    pub eigenphases: Vec<f64>,
    pub in_gap: Vec<bool>,
    /// Circular distance of each eigenphase from the sampled free band.
    pub band_distance: Vec<f64>,
}

impl SpectrumRow {
    pub fn gap_phases(&self) -> Vec<f64> {
        self.eigenphases.iter().zip(&self.in_gap).filter(|(_, g)| **g).map(|(w, _)| *w).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub ring_size: usize,
    pub gap_tolerance: f64,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    pub fn gap_count(&self) -> usize {
        self.rows.iter().map(|r| r.in_gap.iter().filter(|g| **g).count()).sum()
    }
}

/// Classification tolerance for a ring of `m` sites.
pub fn gap_tolerance(m: usize) -> f64 {
    10.0 / m as f64 + 1e-6
}

/// Free two-particle band at total momentum `p`: the phases
/// `ω_a(p/2 + k) + ω_b(p/2 − k)` on a midpoint grid in `k`.
///
/// `k ↦ W(p/2 + k) ⊗ W(p/2 − k)` is `2L`-Lipschitz for a symbol with
/// derivative bound `L`, which sets the resolution as in [`band_sample`].
pub fn free_band(w: &WalkSymbol, p: f64) -> Result<BandSample> {
    w.terms_1d()?;
    let mut phases = Vec::with_capacity(BAND_GRID * w.coin_dim() * w.coin_dim());
    for k in midpoint_grid(BAND_GRID) {
        let a = eigenphases(&w.eval1(p / 2.0 + k))?;
        let b = eigenphases(&w.eval1(p / 2.0 - k))?;
        phases.extend(a.iter().flat_map(|x| b.iter().map(move |y| wrap_phase(x + y))));
    }
    phases.sort_by(f64::total_cmp);
    let resolution = FRAC_PI_2 * 2.0 * w.derivative_bound() * PI / BAND_GRID as f64;
    Ok(BandSample { phases, resolution })
}

/// Diagonalizes every momentum block; an eigenphase is "in gap" when it lies
/// further than `10/M + 1e-6` from the free band at the same `p`.
pub fn ring_spectrum(m: usize, w: &WalkSymbol, gamma: &UnitaryCoin) -> Result<SpectrumTable> {
    if m < 4 {
        return Err(WalkError::InvalidParameter(format!("ring size {m} is below 4")));
    }
    let tol = gap_tolerance(m);
    let rows = (0..m)
        .into_par_iter()
        .map(|j| {
            let p = TAU * j as f64 / m as f64;
            let p = if p > PI { p - TAU } else { p };
            let mut phases = Vec::with_capacity(m * gamma.dim());
            for block in sublattice_blocks(&ring_block(m, w, gamma, p)?, m, w)? {
                phases.extend(eigenphases(&block)?);
            }
            phases.sort_by(f64::total_cmp);
            let band = free_band(w, p)?;
            let band_distance: Vec<f64> = phases.iter().map(|&x| band.distance(x)).collect();
            let in_gap = band_distance.iter().map(|&dist| dist > tol).collect();
            Ok(SpectrumRow { index: j, p, eigenphases: phases, in_gap, band_distance })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable { ring_size: m, gap_tolerance: tol, rows })
}

fn torus_index(coords: &[i64], sizes: &[usize]) -> usize {
    coords.iter().zip(sizes).fold(0, |acc, (&c, &n)| acc * n + c.rem_euclid(n as i64) as usize)
}

fn torus_coords(mut idx: usize, sizes: &[usize]) -> Vec<i64> {
    let mut c = vec![0; sizes.len()];
    for (slot, &n) in c.iter_mut().zip(sizes).rev() {
        *slot = (idx % n) as i64;
        idx /= n;
    }
    c
}

/// Dense relative walk with the coin at the origin, on a torus of `sizes`
/// compressed sites: `φ'(j) = Σ_κ B_κ [Γφ](j − κ)`.
pub fn relative_torus_matrix(rel: &RelativeWalk, sizes: &[usize], gamma: &UnitaryCoin) -> Result<CMat> {
    let sym = rel.symbol();
    let dd = sym.coin_dim();
    check_torus(rel, sizes, gamma)?;
    let sites: usize = sizes.iter().product();
    let mut b = CMat::zeros(sites * dd, sites * dd);
    for (kappa, coef) in sym.terms() {
        let at_origin = coef * gamma.matrix();
        for y in 0..sites {
            let yc = torus_coords(y, sizes);
            let src: Vec<i64> = yc.iter().zip(kappa).map(|(a, b)| a - b).collect();
            let si = torus_index(&src, sizes);
            let blk = if si == 0 { &at_origin } else { coef };
            let mut view = b.view_mut((y * dd, si * dd), (dd, dd));
            view += blk;
        }
    }
    Ok(b)
}

/// Matrix-free application of the same operator to `phi` (indexed `site·d² + a`).
pub fn relative_torus_apply(rel: &RelativeWalk, sizes: &[usize], gamma: &UnitaryCoin, phi: &[C64]) -> Result<Vec<C64>> {
    let sym = rel.symbol();
    let dd = sym.coin_dim();
    check_torus(rel, sizes, gamma)?;
    let sites: usize = sizes.iter().product();
    if phi.len() != sites * dd {
        return Err(WalkError::DimensionMismatch { expected: sites * dd, actual: phi.len(), context: "torus vector" });
    }
    let mut src = phi.to_vec();
    let g = gamma.matrix();
    for r in 0..dd {
        src[r] = (0..dd).map(|c| g[(r, c)] * phi[c]).sum();
    }
    let mut out = vec![ZERO; sites * dd];
    for (kappa, coef) in sym.terms() {
        for y in 0..sites {
            let yc = torus_coords(y, sizes);
            let from: Vec<i64> = yc.iter().zip(kappa).map(|(a, b)| a - b).collect();
            let si = torus_index(&from, sizes);
            for r in 0..dd {
                out[y * dd + r] += (0..dd).map(|c| coef[(r, c)] * src[si * dd + c]).sum::<C64>();
            }
        }
    }
    Ok(out)
}

fn check_torus(rel: &RelativeWalk, sizes: &[usize], gamma: &UnitaryCoin) -> Result<()> {
    let sym = rel.symbol();
    if sizes.len() != sym.lattice_dim() || sizes.contains(&0) {
        return Err(WalkError::DimensionMismatch {
            expected: sym.lattice_dim(),
            actual: sizes.len(),
            context: "torus sizes",
        });
    }
    if gamma.dim() != sym.coin_dim() {
        return Err(WalkError::DimensionMismatch {
            expected: sym.coin_dim(),
            actual: gamma.dim(),
            context: "collision coin",
        });
    }
    Ok(())
}
