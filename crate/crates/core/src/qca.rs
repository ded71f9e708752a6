//! Lattice-gas automaton on a double qubit chain.
//!
//! Cell `c` owns two qubits: bit `2c` marks a left mover (`↓`, coin index 1)
//! and bit `2c + 1` a right mover (`↑`, coin index 0). One step applies the
//! cell coin everywhere and then shifts the right chain one cell right and the
//! left chain one cell left, matching the walk `S·C`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coin::{singlet_vector, symmetric_basis, UnitaryCoin, UNITARITY_TOL};
use crate::error::{Result, WalkError};
use crate::linalg::{unitarity_residual, CMat, CVec, C64, ONE, ZERO};
use crate::state::{Lattice, TwoParticleState};
use crate::step::{build_interacting_step, StepOperator};
use crate::symbol::{coin_walk, WalkSymbol};

/// Largest ring for which a dense `4^M` amplitude vector is produced.
pub const DENSE_MAX_CELLS: usize = 12;
/// Occupation strings are stored in a `u64`.
pub const MAX_CELLS: usize = 32;

const UP: usize = 0;
const DOWN: usize = 1;

fn bit(cell: usize, coin: usize) -> u64 {
    match coin {
        UP => 1 << (2 * cell + 1),
        _ => 1 << (2 * cell),
    }
}

/// Block-diagonal cell unitary: `|00⟩` fixed, `block` on `(|01⟩, |10⟩) = (↑, ↓)`
/// and the phase `γ` on `|11⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCoin {
    block: UnitaryCoin,
    gamma: C64,
}

impl CellCoin {
    pub fn new(block: UnitaryCoin, gamma: C64) -> Result<Self> {
        if block.dim() != 2 {
            return Err(WalkError::DimensionMismatch { expected: 2, actual: block.dim(), context: "cell coin block" });
        }
        let r = (gamma.norm() - 1.0).abs();
        if r > UNITARITY_TOL {
            return Err(WalkError::NotUnitary { residual: r, tolerance: UNITARITY_TOL });
        }
        Ok(Self { block, gamma })
    }

    pub fn block(&self) -> &UnitaryCoin {
        &self.block
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }

    /// The 4×4 matrix in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn matrix(&self) -> CMat {
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = ONE;
        m.view_mut((1, 1), (2, 2)).copy_from(self.block.matrix());
        m[(3, 3)] = self.gamma;
        m
    }
}

/// Amplitudes over occupation strings, grouped by particle number.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GasState {
    cells: usize,
    sectors: BTreeMap<u32, BTreeMap<u64, C64>>,
}

impl GasState {
    pub fn empty(cells: usize) -> Result<Self> {
        if cells == 0 || cells > MAX_CELLS {
            return Err(WalkError::InvalidParameter(format!("ring of {cells} cells is outside 1..={MAX_CELLS}")));
        }
        Ok(Self { cells, sectors: BTreeMap::new() })
    }

    pub fn vacuum(cells: usize) -> Result<Self> {
        Self::basis(cells, 0)
    }

    pub fn basis(cells: usize, key: u64) -> Result<Self> {
        let mut s = Self::empty(cells)?;
        s.add(key, ONE)?;
        Ok(s)
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn add(&mut self, key: u64, amp: C64) -> Result<()> {
        if self.cells < MAX_CELLS && key >> (2 * self.cells) != 0 {
            return Err(WalkError::InvalidParameter(format!(
                "occupation string {key:#x} exceeds {} cells",
                self.cells
            )));
        }
        *self.sectors.entry(key.count_ones()).or_default().entry(key).or_insert(ZERO) += amp;
        Ok(())
    }

    pub fn amplitude(&self, key: u64) -> C64 {
        self.sectors.get(&key.count_ones()).and_then(|s| s.get(&key)).copied().unwrap_or(ZERO)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, C64)> + '_ {
        self.sectors.values().flat_map(|s| s.iter().map(|(k, a)| (*k, *a)))
    }

    pub fn len(&self) -> usize {
        self.sectors.values().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// `⟨P_n⟩` for every populated particle number `n`.
    pub fn sector_weights(&self) -> BTreeMap<u32, f64> {
        self.sectors.iter().map(|(n, s)| (*n, s.values().map(|a| a.norm_sqr()).sum())).collect()
    }

    /// Restriction to the `n`-particle sector.
    pub fn sector_projection(&self, n: u32) -> GasState {
        let mut out = GasState { cells: self.cells, sectors: BTreeMap::new() };
        if let Some(s) = self.sectors.get(&n) {
            out.sectors.insert(n, s.clone());
        }
        out
    }

    pub fn inner(&self, other: &GasState) -> C64 {
        self.entries().map(|(k, a)| a.conj() * other.amplitude(k)).sum()
    }

    /// Largest amplitude difference over the union of both supports.
    pub fn max_diff(&self, other: &GasState) -> f64 {
        let a = self.entries().map(|(k, v)| (v - other.amplitude(k)).norm());
        let b = other.entries().map(|(k, v)| (v - self.amplitude(k)).norm());
        a.chain(b).fold(0.0, f64::max)
    }

    /// Expected occupation of each cell as `(left, right)`.
    pub fn occupations(&self) -> Vec<(f64, f64)> {
        let mut occ = vec![(0.0, 0.0); self.cells];
        for (k, a) in self.entries() {
            let w = a.norm_sqr();
            for (c, o) in occ.iter_mut().enumerate() {
                if k & bit(c, DOWN) != 0 {
                    o.0 += w;
                }
                if k & bit(c, UP) != 0 {
                    o.1 += w;
                }
            }
        }
        occ
    }

    /// Dense `4^M` vector indexed by the occupation string; refused above
    /// [`DENSE_MAX_CELLS`].
    pub fn to_dense(&self) -> Result<CVec> {
        if self.cells > DENSE_MAX_CELLS {
            return Err(WalkError::InvalidParameter(format!(
                "dense gas vectors are limited to {DENSE_MAX_CELLS} cells, got {}",
                self.cells
            )));
        }
        let mut v = CVec::zeros(1 << (2 * self.cells));
        for (k, a) in self.entries() {
            v[k as usize] = a;
        }
        Ok(v)
    }
}

fn apply_cell_coin(map: &BTreeMap<u64, C64>, cell: usize, coin: &CellCoin) -> BTreeMap<u64, C64> {
    let (u, d) = (bit(cell, UP), bit(cell, DOWN));
    let m = coin.block.matrix();
    let mut out = BTreeMap::new();
    let mut push = |k: u64, a: C64| {
        if a != ZERO {
            *out.entry(k).or_insert(ZERO) += a;
        }
    };
    for (&k, &a) in map {
        let rest = k & !(u | d);
        match (k & u != 0, k & d != 0) {
            (false, false) => push(k, a),
            (true, true) => push(k, coin.gamma * a),
            (up, _) => {
                let col = if up { UP } else { DOWN };
                push(rest | u, m[(UP, col)] * a);
                push(rest | d, m[(DOWN, col)] * a);
            }
        }
    }
    out
}

fn shift_key(k: u64, cells: usize) -> u64 {
    let mut out = 0;
    for c in 0..cells {
        if k & bit(c, UP) != 0 {
            out |= bit((c + 1) % cells, UP);
        }
        if k & bit(c, DOWN) != 0 {
            out |= bit((c + cells - 1) % cells, DOWN);
        }
    }
    out
}

/// One automaton step: the cell coin on every cell, then the chain shifts.
pub fn qca_step(state: &GasState, coin: &CellCoin) -> GasState {
    let mut sectors = BTreeMap::new();
    for (&n, sector) in &state.sectors {
        let mut map = sector.clone();
        for c in 0..state.cells {
            map = apply_cell_coin(&map, c, coin);
        }
        let shifted: BTreeMap<u64, C64> = map.into_iter().map(|(k, a)| (shift_key(k, state.cells), a)).collect();
        if !shifted.is_empty() {
            sectors.insert(n, shifted);
        }
    }
    GasState { cells: state.cells, sectors }
}

pub fn qca_evolve(state: &GasState, coin: &CellCoin, t: usize) -> GasState {
    (0..t).fold(state.clone(), |s, _| qca_step(&s, coin))
}

/// Single-particle sector as per-cell `(↑, ↓)` amplitudes.
pub fn single_particle_amplitudes(state: &GasState) -> Vec<[C64; 2]> {
    let mut out = vec![[ZERO; 2]; state.cells];
    for (c, slot) in out.iter_mut().enumerate() {
        slot[UP] = state.amplitude(bit(c, UP));
        slot[DOWN] = state.amplitude(bit(c, DOWN));
    }
    out
}

pub fn from_single_particle(amps: &[[C64; 2]]) -> Result<GasState> {
    let mut s = GasState::empty(amps.len())?;
    for (c, a) in amps.iter().enumerate() {
        for coin in [UP, DOWN] {
            if a[coin] != ZERO {
                s.add(bit(c, coin), a[coin])?;
            }
        }
    }
    Ok(s)
}

/// Mode order used for the antisymmetric picture: by cell, then `↑` before `↓`.
fn mode_sign(c1: usize, a1: usize, c2: usize, a2: usize) -> f64 {
    if (c1, a1) > (c2, a2) {
        1.0
    } else {
        -1.0
    }
}

/// Which two-particle wave function the automaton's pair sector is read as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairPicture {
    /// `Ψ(m₁; m₂) = a({m₁, m₂})/√2`, hard-core bosons. Exact on any ring.
    Bose,
    /// `Ψ(m₁; m₂) = σ(m₁, m₂) a({m₁, m₂})/√2` with `σ = +1` when `m₁` comes
    /// later in the mode order. Exact for pairs at even cell separation while
    /// no particle wraps the ring; pairs at odd separation cross without
    /// meeting and pick up a sign at each crossing.
    Fermi,
}

/// Reads the two-particle sector as a walk state on a ring of the same size;
/// cell `c` is lattice storage index `c`.
pub fn pair_to_walk(state: &GasState, picture: PairPicture) -> Result<TwoParticleState> {
    let m = state.cells;
    let lat = Lattice::ring(m);
    let mut out = TwoParticleState::zeros(lat, 2);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    if let Some(sector) = state.sectors.get(&2) {
        for (&k, &a) in sector {
            let modes: Vec<(usize, usize)> =
                (0..m).flat_map(|c| [UP, DOWN].map(|s| (c, s))).filter(|&(c, s)| k & bit(c, s) != 0).collect();
            let [(c1, a1), (c2, a2)] = modes[..] else { unreachable!("two-particle key has two bits") };
            for ((x1, s1), (x2, s2)) in [((c1, a1), (c2, a2)), ((c2, a2), (c1, a1))] {
                let sign = match picture {
                    PairPicture::Bose => 1.0,
                    PairPicture::Fermi => mode_sign(x1, s1, x2, s2),
                };
                let o = out.offset(x1, x2) + s1 * 2 + s2;
                out.amplitudes_mut()[o] = a * (sign * h);
            }
        }
    }
    Ok(out)
}

/// Inverse of [`pair_to_walk`]. Fails when the walk state is not of the
/// required exchange symmetry or puts both particles in one mode.
pub fn pair_from_walk(psi: &TwoParticleState, picture: PairPicture) -> Result<GasState> {
    let lat = psi.lattice();
    if !lat.is_ring() || psi.coin_dim() != 2 {
        return Err(WalkError::InvalidParameter("pair states must live on a ring with two coin states".into()));
    }
    let m = lat.sites();
    let mut s = GasState::empty(m)?;
    let tol = 1e-13 * psi.norm().max(1.0);
    for x1 in 0..m {
        for x2 in 0..m {
            for s1 in [UP, DOWN] {
                for s2 in [UP, DOWN] {
                    let v = psi.block(x1, x2)[s1 * 2 + s2];
                    if (x1, s1) == (x2, s2) {
                        if v.norm() > tol {
                            return Err(WalkError::Consistency("two particles share one mode".into()));
                        }
                        continue;
                    }
                    let sign = match picture {
                        PairPicture::Bose => 1.0,
                        PairPicture::Fermi => mode_sign(x1, s1, x2, s2),
                    };
                    let partner = psi.block(x2, x1)[s2 * 2 + s1];
                    let other_sign = match picture {
                        PairPicture::Bose => 1.0,
                        PairPicture::Fermi => mode_sign(x2, s2, x1, s1),
                    };
                    if (v * sign - partner * other_sign).norm() > tol {
                        return Err(WalkError::Consistency("walk state has the wrong exchange symmetry".into()));
                    }
                    if (x1, s1) < (x2, s2) {
                        s.add(bit(x1, s1) | bit(x2, s2), v * sign * std::f64::consts::SQRT_2)?;
                    }
                }
            }
        }
    }
    Ok(s)
}

/// `Γ = B U B† + P₋` with `B` the symmetric collision basis.
pub fn symmetric_collision_coin(u_sym: &CMat) -> Result<UnitaryCoin> {
    if u_sym.shape() != (3, 3) {
        return Err(WalkError::DimensionMismatch { expected: 3, actual: u_sym.nrows(), context: "symmetric block" });
    }
    let r = unitarity_residual(u_sym);
    if r > UNITARITY_TOL {
        return Err(WalkError::NotUnitary { residual: r, tolerance: UNITARITY_TOL });
    }
    let b = symmetric_basis();
    let s = singlet_vector();
    UnitaryCoin::new(&b * u_sym * b.adjoint() + &s * s.adjoint())
}

/// Interacting step whose collision coin is `u_sym` on the symmetric
/// subspace and the identity on the singlet.
pub fn bose_collision_step(w: &WalkSymbol, u_sym: &CMat, lattice: Lattice) -> Result<StepOperator> {
    build_interacting_step(w, &symmetric_collision_coin(u_sym)?, lattice)
}

/// `B† (C⊗C)† [1 + (γ − 1)|s⟩⟨s|] B`, where `|s⟩ = (|↑↓⟩ + |↓↑⟩)/√2`: the
/// symmetric block that makes the walk `S·C` reproduce the automaton on
/// hard-core pairs.
pub fn hard_core_symmetric_block(coin: &CellCoin) -> CMat {
    let c = coin.block.kron(&coin.block);
    let b = symmetric_basis();
    let s = b.column(1).into_owned();
    let phase = CMat::identity(4, 4) + &s * s.adjoint() * (coin.gamma - ONE);
    b.adjoint() * c.matrix().adjoint() * phase * &b
}

/// Collision phase of the antisymmetric walk equivalent to the automaton:
/// `γ_walk = −γ / det C`.
pub fn fermi_collision_phase(coin: &CellCoin) -> C64 {
    -coin.gamma / coin.block.matrix().determinant()
}

/// Walk-core step equivalent to the automaton's pair sector in `picture`.
pub fn equivalent_pair_step(coin: &CellCoin, picture: PairPicture, cells: usize) -> Result<StepOperator> {
    let w = coin_walk(&coin.block)?;
    let lat = Lattice::ring(cells);
    match picture {
        PairPicture::Bose => bose_collision_step(&w, &hard_core_symmetric_block(coin), lat),
        PairPicture::Fermi => {
            build_interacting_step(&w, &UnitaryCoin::singlet_phase(fermi_collision_phase(coin))?, lat)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEquivalence {
    pub picture: PairPicture,
    pub cells: usize,
    pub steps: usize,
    /// Phase per step, fitted once from the first step.
    pub phase: C64,
    /// `max |Ψ_walk(t) · phase^t − Ψ_gas(t)|` for `t = 0..=steps`.
    pub deviations: Vec<f64>,
}

impl PairEquivalence {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().cloned().fold(0.0, f64::max)
    }
}

/// Runs the automaton and the equivalent walk side by side from `initial`.
pub fn pair_equivalence(
    coin: &CellCoin,
    initial: &GasState,
    picture: PairPicture,
    steps: usize,
) -> Result<PairEquivalence> {
    let cells = initial.cells;
    let pair = initial.sector_projection(2);
    let walk_step = equivalent_pair_step(coin, picture, cells)?;
    let mut gas = pair.clone();
    let mut walk = pair_to_walk(&pair, picture)?;
    let mut phase = ONE;
    let mut acc = ONE;
    let mut deviations = vec![pair_to_walk(&gas, picture)?.max_diff(&walk)?];
    for t in 1..=steps {
        gas = qca_step(&gas, coin);
        walk = walk_step.apply(&walk)?;
        let mapped = pair_to_walk(&gas, picture)?;
        if t == 1 {
            let ov = walk.inner(&mapped)?;
            if ov.norm() < 1e-12 {
                return Err(WalkError::Consistency("automaton and walk are orthogonal after one step".into()));
            }
            phase = ov / ov.norm();
        }
        acc *= phase;
        let mut scaled = walk.clone();
        scaled.scale(acc);
        deviations.push(mapped.max_diff(&scaled)?);
    }
    Ok(PairEquivalence { picture, cells, steps, phase, deviations })
}

/// `|11⟩` in one cell: the singlet pair at rest.
pub fn doubly_occupied(cells: usize, cell: usize) -> Result<GasState> {
    if cell >= cells {
        return Err(WalkError::InvalidParameter(format!("cell {cell} is outside a ring of {cells}")));
    }
    GasState::basis(cells, bit(cell, UP) | bit(cell, DOWN))
}

/// Single particle at `cell` with coin state `coin_index` (0 = `↑`, 1 = `↓`).
pub fn single_particle(cells: usize, cell: usize, coin_index: usize) -> Result<GasState> {
    if cell >= cells || coin_index > 1 {
        return Err(WalkError::InvalidParameter(format!("no mode ({cell}, {coin_index}) on a ring of {cells}")));
    }
    GasState::basis(cells, bit(cell, coin_index))
}

/// `B† (H⊗H) B`, the symmetric block of the fast-molecule collision.
pub fn hadamard_pair_block() -> CMat {
    let h = UnitaryCoin::hadamard().kron(&UnitaryCoin::hadamard());
    let b = symmetric_basis();
    b.adjoint() * h.matrix() * b
}

/// `|↑↑⟩` with both particles at the origin.
pub fn up_up_at_origin(lattice: Lattice) -> TwoParticleState {
    let mut s = TwoParticleState::zeros(lattice, 2);
    s.set(0, 0, UP, UP, ONE).expect("origin is on every lattice");
    s
}

/// Probability with `|x₁ − x₂| ≤ width` and centre of mass beyond
/// `t/√2 + margin`, the reach of the free Hadamard walk.
pub fn beyond_free_reach(dist: &crate::state::JointDistribution, t: usize, width: i64, margin: f64) -> f64 {
    let reach = t as f64 * std::f64::consts::FRAC_1_SQRT_2 + margin;
    dist.mass_where(|x1, x2| (x1 - x2).abs() <= width && ((x1 + x2) as f64 / 2.0).abs() > reach)
}
