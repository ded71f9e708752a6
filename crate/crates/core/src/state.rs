//! Two-particle amplitudes on a finite one-dimensional lattice.

use serde::{Deserialize, Serialize};

use crate::coin::singlet_vector;
use crate::error::{Result, WalkError};
use crate::linalg::{C64, ZERO};

/// Either a ring of `M` sites or a window of sites `−L..=L` outside of which
/// amplitudes are never allowed to go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lattice {
    Ring { size: usize },
    Window { radius: usize },
}

impl Lattice {
    pub fn ring(size: usize) -> Self {
        Lattice::Ring { size }
    }

    pub fn window(radius: usize) -> Self {
        Lattice::Window { radius }
    }

    pub fn sites(&self) -> usize {
        match *self {
            Lattice::Ring { size } => size,
            Lattice::Window { radius } => 2 * radius + 1,
        }
    }

    pub fn is_ring(&self) -> bool {
        matches!(self, Lattice::Ring { .. })
    }

    /// Coordinate of storage index `i`. Ring coordinates are centred in `(−M/2, M/2]`.
    pub fn coord(&self, i: usize) -> i64 {
        match *self {
            Lattice::Ring { size } => {
                let i = i as i64;
                if 2 * i > size as i64 {
                    i - size as i64
                } else {
                    i
                }
            }
            Lattice::Window { radius } => i as i64 - radius as i64,
        }
    }

    /// Storage index of coordinate `x`; `None` if a window does not contain it.
    pub fn index(&self, x: i64) -> Option<usize> {
        match *self {
            Lattice::Ring { size } => Some(x.rem_euclid(size as i64) as usize),
            Lattice::Window { radius } => {
                let r = radius as i64;
                (-r..=r).contains(&x).then(|| (x + r) as usize)
            }
        }
    }

    /// Signed separation `x₁ − x₂`, taken as the shortest representative on a ring.
    pub fn separation(&self, i1: usize, i2: usize) -> i64 {
        match *self {
            Lattice::Ring { size } => self.coord((i1 + size - i2) % size),
            Lattice::Window { .. } => i1 as i64 - i2 as i64,
        }
    }
}

/// Amplitudes `Ψ(x₁, x₂, α, β)`, stored row-major in `(x₁, x₂, α, β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleState {
    lattice: Lattice,
    d: usize,
    amps: Vec<C64>,
}

impl TwoParticleState {
    pub fn zeros(lattice: Lattice, d: usize) -> Self {
        let n = lattice.sites();
        Self { lattice, d, amps: vec![ZERO; n * n * d * d] }
    }

    pub fn from_amplitudes(lattice: Lattice, d: usize, amps: Vec<C64>) -> Result<Self> {
        let n = lattice.sites();
        if amps.len() != n * n * d * d {
            return Err(WalkError::DimensionMismatch {
                expected: n * n * d * d,
                actual: amps.len(),
                context: "amplitude array length",
            });
        }
        Ok(Self { lattice, d, amps })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn coin_dim(&self) -> usize {
        self.d
    }

    pub fn sites(&self) -> usize {
        self.lattice.sites()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    #[inline]
    pub fn offset(&self, i1: usize, i2: usize) -> usize {
        (i1 * self.sites() + i2) * self.d * self.d
    }

    /// The `d²` collision-space vector at storage indices `(i1, i2)`.
    pub fn block(&self, i1: usize, i2: usize) -> &[C64] {
        let o = self.offset(i1, i2);
        &self.amps[o..o + self.d * self.d]
    }

    pub fn block_mut(&mut self, i1: usize, i2: usize) -> &mut [C64] {
        let o = self.offset(i1, i2);
        let dd = self.d * self.d;
        &mut self.amps[o..o + dd]
    }

    pub fn get(&self, x1: i64, x2: i64, a: usize, b: usize) -> C64 {
        match (self.lattice.index(x1), self.lattice.index(x2)) {
            (Some(i1), Some(i2)) => self.block(i1, i2)[a * self.d + b],
            _ => ZERO,
        }
    }

    pub fn set(&mut self, x1: i64, x2: i64, a: usize, b: usize, value: C64) -> Result<()> {
        let (i1, i2) = self.indices(x1, x2)?;
        let d = self.d;
        self.block_mut(i1, i2)[a * d + b] = value;
        Ok(())
    }

    /// Overwrites the collision-space vector at `(x₁, x₂)`.
    pub fn set_block(&mut self, x1: i64, x2: i64, v: &[C64]) -> Result<()> {
        if v.len() != self.d * self.d {
            return Err(WalkError::DimensionMismatch {
                expected: self.d * self.d,
                actual: v.len(),
                context: "collision-space vector",
            });
        }
        let (i1, i2) = self.indices(x1, x2)?;
        self.block_mut(i1, i2).copy_from_slice(v);
        Ok(())
    }

    fn indices(&self, x1: i64, x2: i64) -> Result<(usize, usize)> {
        let outside = |x: i64| WalkError::InvalidParameter(format!("site {x} is outside the window"));
        let i1 = self.lattice.index(x1).ok_or_else(|| outside(x1))?;
        let i2 = self.lattice.index(x2).ok_or_else(|| outside(x2))?;
        Ok((i1, i2))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(WalkError::InvalidParameter("cannot normalize the zero state".into()));
        }
        self.amps.iter_mut().for_each(|z| *z /= n);
        Ok(())
    }

    pub fn scale(&mut self, c: C64) {
        self.amps.iter_mut().for_each(|z| *z *= c);
    }

    pub fn inner(&self, other: &TwoParticleState) -> Result<C64> {
        self.check_compatible(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Largest amplitude difference to another state on the same lattice.
    pub fn max_diff(&self, other: &TwoParticleState) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.amps.iter().zip(&other.amps).fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    pub fn distance(&self, other: &TwoParticleState) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    fn check_compatible(&self, other: &TwoParticleState) -> Result<()> {
        if self.lattice != other.lattice || self.d != other.d {
            return Err(WalkError::InvalidParameter("states live on different lattices".into()));
        }
        Ok(())
    }

    /// `Ψ'(x₁, α; x₂, β) = Ψ(x₂, β; x₁, α)`.
    pub fn exchange(&self) -> TwoParticleState {
        let n = self.sites();
        let d = self.d;
        let mut out = TwoParticleState::zeros(self.lattice, d);
        for i1 in 0..n {
            for i2 in 0..n {
                let src = self.block(i2, i1);
                let dst = out.block_mut(i1, i2);
                for a in 0..d {
                    for b in 0..d {
                        dst[a * d + b] = src[b * d + a];
                    }
                }
            }
        }
        out
    }

    /// `(Ψ − XΨ)/2`, the antisymmetric part.
    pub fn fermi_projection(&self) -> TwoParticleState {
        self.symmetrize(-1.0)
    }

    /// `(Ψ + XΨ)/2`, the symmetric part.
    pub fn bose_projection(&self) -> TwoParticleState {
        self.symmetrize(1.0)
    }

    fn symmetrize(&self, sign: f64) -> TwoParticleState {
        let x = self.exchange();
        let amps = self.amps.iter().zip(&x.amps).map(|(a, b)| (a + b * sign) * 0.5).collect();
        TwoParticleState { lattice: self.lattice, d: self.d, amps }
    }

    /// Moves both particles by `dx` sites. On a window the shift must keep all
    /// non-zero amplitudes inside.
    pub fn translate(&self, dx: i64) -> Result<TwoParticleState> {
        let n = self.sites();
        let mut out = TwoParticleState::zeros(self.lattice, self.d);
        for i1 in 0..n {
            for i2 in 0..n {
                let src = self.block(i1, i2);
                if src.iter().all(|z| *z == ZERO) {
                    continue;
                }
                let (x1, x2) = (self.lattice.coord(i1) + dx, self.lattice.coord(i2) + dx);
                let (j1, j2) = out.indices(x1, x2)?;
                out.block_mut(j1, j2).copy_from_slice(src);
            }
        }
        Ok(out)
    }

    /// Largest `|x|` over both particles among non-zero amplitudes.
    pub fn support_radius(&self) -> usize {
        let n = self.sites();
        let mut r = 0usize;
        for i1 in 0..n {
            for i2 in 0..n {
                if self.block(i1, i2).iter().any(|z| *z != ZERO) {
                    let a = self.lattice.coord(i1).unsigned_abs() as usize;
                    let b = self.lattice.coord(i2).unsigned_abs() as usize;
                    r = r.max(a).max(b);
                }
            }
        }
        r
    }

    pub fn joint_distribution(&self) -> JointDistribution {
        let n = self.sites();
        let mut prob = vec![0.0; n * n];
        for i1 in 0..n {
            for i2 in 0..n {
                prob[i1 * n + i2] = pair_summed_weight(self.block(i1, i2), self.d);
            }
        }
        JointDistribution { coords: (0..n).map(|i| self.lattice.coord(i)).collect(), prob }
    }
}

/// `Σ_{αβ} |v_{αβ}|²`, adding `(α, β)` and `(β, α)` first so that exchanged
/// blocks give bit-identical weights.
fn pair_summed_weight(v: &[C64], d: usize) -> f64 {
    let mut total = 0.0;
    for a in 0..d {
        total += v[a * d + a].norm_sqr();
        for b in a + 1..d {
            total += v[a * d + b].norm_sqr() + v[b * d + a].norm_sqr();
        }
    }
    total
}

/// The singlet `(|↑↓⟩ − |↓↑⟩)/√2` with both particles at the origin.
pub fn singlet_state_at_origin(lattice: Lattice) -> TwoParticleState {
    let mut s = TwoParticleState::zeros(lattice, 2);
    let v: Vec<C64> = singlet_vector().iter().cloned().collect();
    s.set_block(0, 0, &v).expect("origin is on every lattice");
    s
}

/// `P(x₁, x₂) = Σ_{αβ} |Ψ(x₁, x₂, α, β)|²` with storage order matching the state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub coords: Vec<i64>,
    /// Row-major over `(x₁, x₂)` storage indices.
    pub prob: Vec<f64>,
}

impl JointDistribution {
    pub fn sites(&self) -> usize {
        self.coords.len()
    }

    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.prob[i1 * self.sites() + i2]
    }

    pub fn total(&self) -> f64 {
        self.prob.iter().sum()
    }

    /// Marginal of particle one, indexed like `coords`.
    pub fn marginal_first(&self) -> Vec<f64> {
        let n = self.sites();
        (0..n).map(|i| (0..n).map(|j| self.at(i, j)).sum()).collect()
    }

    /// Distribution of the integer centre-of-mass coordinate `(x₁ + x₂)/2`
    /// over even sums, keyed by that coordinate. Odd sums are skipped.
    pub fn centre_of_mass_even(&self) -> Vec<(i64, f64)> {
        let mut acc = std::collections::BTreeMap::new();
        let n = self.sites();
        for i in 0..n {
            for j in 0..n {
                let s = self.coords[i] + self.coords[j];
                if s.rem_euclid(2) == 0 {
                    *acc.entry(s / 2).or_insert(0.0) += self.at(i, j);
                }
            }
        }
        acc.into_iter().collect()
    }

    /// Probability that `|x₁ − x₂| ≤ width` (shortest distance on a ring).
    pub fn near_diagonal_mass(&self, lattice: Lattice, width: usize) -> f64 {
        let n = self.sites();
        let mut m = 0.0;
        for i in 0..n {
            for j in 0..n {
                if lattice.separation(i, j).unsigned_abs() as usize <= width {
                    m += self.at(i, j);
                }
            }
        }
        m
    }

    /// Total probability of the sites `(x₁, x₂)` (lattice coordinates) that
    /// satisfy `keep`.
    pub fn mass_where<F: Fn(i64, i64) -> bool>(&self, keep: F) -> f64 {
        let n = self.sites();
        let mut m = 0.0;
        for i in 0..n {
            for j in 0..n {
                if keep(self.coords[i], self.coords[j]) {
                    m += self.at(i, j);
                }
            }
        }
        m
    }

    /// True when `P(x₁, x₂) = P(x₂, x₁)` holds exactly.
    pub fn is_exchange_symmetric(&self) -> bool {
        let n = self.sites();
        (0..n).all(|i| (0..n).all(|j| self.at(i, j) == self.at(j, i)))
    }
}

/// Outermost peaks of a 1D profile: smooth with a centred moving average of
/// `window` sites, then return the leftmost and rightmost local maxima that
/// reach `fraction` of the smoothed maximum.
pub fn outer_peaks(coords: &[i64], values: &[f64], window: usize, fraction: f64) -> Option<(i64, i64)> {
    let n = values.len();
    if n < 3 || coords.len() != n {
        return None;
    }
    let h = window / 2;
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(h);
            let hi = (i + h).min(n - 1);
            values[lo..=hi].iter().sum::<f64>() / window as f64
        })
        .collect();
    let top = smooth.iter().cloned().fold(0.0, f64::max);
    let peaks: Vec<usize> = (1..n - 1)
        .filter(|&i| smooth[i] >= smooth[i - 1] && smooth[i] >= smooth[i + 1] && smooth[i] >= fraction * top)
        .collect();
    Some((coords[*peaks.first()?], coords[*peaks.last()?]))
}
