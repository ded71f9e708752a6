//! Translation-invariant walks given by their momentum-space symbol.
//!
//! A symbol is a finite Laurent polynomial `W(p) = Σ_n A_n e^{i n·p}`. The
//! coefficient `A_n` moves amplitude from site `x` to `x + n`, so in position
//! space `(Wψ)(y) = Σ_n A_n ψ(y − n)` and the matching transform is
//! `ψ(p) = Σ_x e^{ipx} ψ(x)`.

use std::collections::BTreeMap;

use crate::coin::UnitaryCoin;
use crate::error::{Result, WalkError};
use crate::linalg::{cis, kron, max_abs, CMat, ONE, ZERO};

/// Tolerance for the exact Laurent-coefficient unitarity identities.
const SYMBOL_UNITARITY_TOL: f64 = 1e-12;

/// Anything that yields a unitary matrix for every point of the `s`-torus.
pub trait UnitaryFamily: Sync {
    fn dim(&self) -> usize;
    fn lattice_dim(&self) -> usize;
    fn eval(&self, k: &[f64]) -> CMat;
    /// Upper bound on `‖dW‖` along any unit-speed path, measured in the 1-norm of `k`.
    fn lipschitz_bound(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkSymbol {
    d: usize,
    s: usize,
    terms: BTreeMap<Vec<i64>, CMat>,
}

impl WalkSymbol {
    /// Builds a symbol, dropping exactly-zero coefficients and checking
    /// `Σ_{n−m=k} A_m† A_n = δ_{k0}` so that every evaluation is unitary.
    pub fn new(d: usize, s: usize, terms: BTreeMap<Vec<i64>, CMat>) -> Result<Self> {
        if d == 0 || s == 0 {
            return Err(WalkError::InvalidParameter("symbol needs d ≥ 1 and s ≥ 1".into()));
        }
        let mut kept = BTreeMap::new();
        for (n, a) in terms {
            if n.len() != s {
                return Err(WalkError::DimensionMismatch {
                    expected: s,
                    actual: n.len(),
                    context: "Laurent exponent length",
                });
            }
            if a.shape() != (d, d) {
                return Err(WalkError::DimensionMismatch {
                    expected: d,
                    actual: a.nrows().max(a.ncols()),
                    context: "Laurent coefficient size",
                });
            }
            if a.iter().any(|z| *z != ZERO) {
                kept.insert(n, a);
            }
        }
        let symbol = Self { d, s, terms: kept };
        let residual = symbol.laurent_unitarity_residual();
        if residual > SYMBOL_UNITARITY_TOL {
            return Err(WalkError::NotUnitary { residual, tolerance: SYMBOL_UNITARITY_TOL });
        }
        Ok(symbol)
    }

    pub fn coin_dim(&self) -> usize {
        self.d
    }

    pub fn lattice_dim(&self) -> usize {
        self.s
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, CMat> {
        &self.terms
    }

    /// Terms of a one-dimensional symbol as `(n, A_n)` pairs.
    pub fn terms_1d(&self) -> Result<Vec<(i64, CMat)>> {
        self.require_1d()?;
        Ok(self.terms.iter().map(|(n, a)| (n[0], a.clone())).collect())
    }

    /// Largest `‖n‖_∞` among the stored terms.
    pub fn neighborhood_size(&self) -> usize {
        self.terms.keys().flat_map(|n| n.iter().map(|x| x.unsigned_abs() as usize)).max().unwrap_or(0)
    }

    pub fn eval(&self, p: &[f64]) -> CMat {
        assert_eq!(p.len(), self.s, "momentum vector has wrong length");
        let mut w = CMat::zeros(self.d, self.d);
        for (n, a) in &self.terms {
            let phase: f64 = n.iter().zip(p).map(|(&ni, &pi)| ni as f64 * pi).sum();
            w += a * cis(phase);
        }
        w
    }

    pub fn eval1(&self, p: f64) -> CMat {
        self.eval(&[p])
    }

    fn require_1d(&self) -> Result<()> {
        if self.s != 1 {
            return Err(WalkError::InvalidParameter(format!(
                "operation needs a one-dimensional symbol, got s = {}",
                self.s
            )));
        }
        Ok(())
    }

    /// Worst deviation of `W(p)†W(p) = 1` read off coefficient by coefficient.
    pub fn laurent_unitarity_residual(&self) -> f64 {
        let mut products: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
        for (n, a) in &self.terms {
            for (m, b) in &self.terms {
                let key: Vec<i64> = n.iter().zip(m).map(|(x, y)| x - y).collect();
                let entry = products.entry(key).or_insert_with(|| CMat::zeros(self.d, self.d));
                *entry += b.adjoint() * a;
            }
        }
        let zero = vec![0; self.s];
        let mut worst = 0.0f64;
        let id = CMat::identity(self.d, self.d);
        let mut saw_zero = false;
        for (k, m) in &products {
            let r = if *k == zero {
                saw_zero = true;
                max_abs(&(m - &id))
            } else {
                max_abs(m)
            };
            worst = worst.max(r);
        }
        if !saw_zero {
            worst = worst.max(1.0);
        }
        worst
    }

    /// Product of two symbols on the same lattice, `(self · other)(p)`.
    pub fn mul(&self, other: &WalkSymbol) -> Result<WalkSymbol> {
        if self.d != other.d || self.s != other.s {
            return Err(WalkError::DimensionMismatch { expected: self.d, actual: other.d, context: "symbol product" });
        }
        let mut out: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
        for (n, a) in &self.terms {
            for (m, b) in &other.terms {
                let key: Vec<i64> = n.iter().zip(m).map(|(x, y)| x + y).collect();
                *out.entry(key).or_insert_with(|| CMat::zeros(self.d, self.d)) += a * b;
            }
        }
        WalkSymbol::new(self.d, self.s, out)
    }

    /// Symbol of a constant coin.
    pub fn constant(coin: &UnitaryCoin, s: usize) -> Result<WalkSymbol> {
        let mut t = BTreeMap::new();
        t.insert(vec![0; s], coin.matrix().clone());
        WalkSymbol::new(coin.dim(), s, t)
    }

    /// Sum over terms of `‖n‖_1 ‖A_n‖_F`.
    pub fn derivative_bound(&self) -> f64 {
        self.terms.iter().map(|(n, a)| n.iter().map(|x| x.unsigned_abs() as f64).sum::<f64>() * a.norm()).sum()
    }
}

impl UnitaryFamily for WalkSymbol {
    fn dim(&self) -> usize {
        self.d
    }
    fn lattice_dim(&self) -> usize {
        self.s
    }
    fn eval(&self, k: &[f64]) -> CMat {
        WalkSymbol::eval(self, k)
    }
    fn lipschitz_bound(&self) -> f64 {
        self.derivative_bound()
    }
}

/// `S(p) = diag(e^{ip}, e^{−ip})` as a symbol.
pub fn shift_symbol() -> WalkSymbol {
    let mut t = BTreeMap::new();
    let mut up = CMat::zeros(2, 2);
    up[(0, 0)] = ONE;
    let mut down = CMat::zeros(2, 2);
    down[(1, 1)] = ONE;
    t.insert(vec![1], up);
    t.insert(vec![-1], down);
    WalkSymbol::new(2, 1, t).expect("shift is unitary")
}

/// One-dimensional walk `W(p) = S(p) C`: ↑ moves right, ↓ moves left.
pub fn coin_walk(coin: &UnitaryCoin) -> Result<WalkSymbol> {
    if coin.dim() != 2 {
        return Err(WalkError::DimensionMismatch {
            expected: 2,
            actual: coin.dim(),
            context: "shift-coin walk needs a 2x2 coin",
        });
    }
    shift_symbol().mul(&WalkSymbol::constant(coin, 1)?)
}

/// The Hadamard walk `W_H(p) = S(p) H`.
pub fn hadamard_walk() -> WalkSymbol {
    coin_walk(&UnitaryCoin::hadamard()).expect("Hadamard is 2x2")
}

/// `σ(p) = [[0, e^{ip}], [e^{−ip}, 0]]` along axis `axis` of an `s`-lattice.
fn sigma_symbol(axis: usize, s: usize) -> WalkSymbol {
    let mut t = BTreeMap::new();
    let mut plus = vec![0; s];
    plus[axis] = 1;
    let mut minus = vec![0; s];
    minus[axis] = -1;
    let mut a = CMat::zeros(2, 2);
    a[(0, 1)] = ONE;
    let mut b = CMat::zeros(2, 2);
    b[(1, 0)] = ONE;
    t.insert(plus, a);
    t.insert(minus, b);
    WalkSymbol::new(2, s, t).expect("σ is unitary")
}

/// Alternating product `C₀ σ(p₁) C₁ ⋯ σ(p_s) C_s`.
pub fn coin_shift_walk(coins: &[UnitaryCoin], s: usize) -> Result<WalkSymbol> {
    if s == 0 || coins.len() != s + 1 {
        return Err(WalkError::DimensionMismatch {
            expected: s + 1,
            actual: coins.len(),
            context: "coin-shift walk needs s+1 coins",
        });
    }
    if let Some(bad) = coins.iter().find(|c| c.dim() != 2) {
        return Err(WalkError::DimensionMismatch {
            expected: 2,
            actual: bad.dim(),
            context: "coin-shift walk coins must be 2x2",
        });
    }
    let mut w = WalkSymbol::constant(&coins[0], s)?;
    for (axis, c) in coins[1..].iter().enumerate() {
        w = w.mul(&sigma_symbol(axis, s))?.mul(&WalkSymbol::constant(c, s)?)?;
    }
    Ok(w)
}

/// `W₁(p/2 + k) ⊗ W₁(p/2 − k)`.
pub fn two_particle_symbol(w: &WalkSymbol, p: f64, k: f64) -> Result<CMat> {
    w.require_1d()?;
    Ok(kron(&w.eval1(p / 2.0 + k), &w.eval1(p / 2.0 - k)))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Two-particle walk at fixed total momentum, as a symbol in the relative
/// momentum.
///
/// The coefficient of `e^{i(n−m)·k}` is `e^{i(n+m)·p/2} A_n ⊗ A_m`. Exponents
/// are divided by their per-axis gcd (`stride`); compressed site `j` then
/// stands for the separation `x₁ − x₂ = stride · j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeWalk {
    symbol: WalkSymbol,
    stride: Vec<i64>,
    total_momentum: Vec<f64>,
}

impl RelativeWalk {
    pub fn new(w: &WalkSymbol, p: &[f64]) -> Result<Self> {
        let s = w.lattice_dim();
        if p.len() != s {
            return Err(WalkError::DimensionMismatch {
                expected: s,
                actual: p.len(),
                context: "total momentum length",
            });
        }
        let d = w.coin_dim();
        let mut raw: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
        for (n, a) in w.terms() {
            for (m, b) in w.terms() {
                let key: Vec<i64> = n.iter().zip(m).map(|(x, y)| x - y).collect();
                let phase: f64 = n.iter().zip(m).zip(p).map(|((x, y), q)| (x + y) as f64 * q / 2.0).sum();
                *raw.entry(key).or_insert_with(|| CMat::zeros(d * d, d * d)) += kron(a, b) * cis(phase);
            }
        }
        let stride: Vec<i64> = (0..s)
            .map(|ax| {
                let g = raw.keys().fold(0, |g, key| gcd(g, key[ax]));
                if g == 0 {
                    1
                } else {
                    g
                }
            })
            .collect();
        let compressed =
            raw.into_iter().map(|(key, a)| (key.iter().zip(&stride).map(|(x, st)| x / st).collect(), a)).collect();
        let symbol = WalkSymbol::new(d * d, s, compressed)?;
        Ok(Self { symbol, stride, total_momentum: p.to_vec() })
    }

    pub fn new_1d(w: &WalkSymbol, p: f64) -> Result<Self> {
        w.require_1d()?;
        Self::new(w, &[p])
    }

    pub fn symbol(&self) -> &WalkSymbol {
        &self.symbol
    }

    pub fn stride(&self) -> &[i64] {
        &self.stride
    }

    pub fn total_momentum(&self) -> &[f64] {
        &self.total_momentum
    }
}

impl UnitaryFamily for RelativeWalk {
    fn dim(&self) -> usize {
        self.symbol.coin_dim()
    }
    fn lattice_dim(&self) -> usize {
        self.symbol.lattice_dim()
    }
    fn eval(&self, k: &[f64]) -> CMat {
        self.symbol.eval(k)
    }
    fn lipschitz_bound(&self) -> f64 {
        self.symbol.derivative_bound()
    }
}

/// A family defined by a closure, with a caller-supplied Lipschitz bound.
pub struct FnFamily<F> {
    dim: usize,
    lattice_dim: usize,
    lipschitz: f64,
    f: F,
}

impl<F: Fn(&[f64]) -> CMat + Sync> FnFamily<F> {
    pub fn new(dim: usize, lattice_dim: usize, lipschitz: f64, f: F) -> Self {
        Self { dim, lattice_dim, lipschitz, f }
    }
}

impl<F: Fn(&[f64]) -> CMat + Sync> UnitaryFamily for FnFamily<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn lattice_dim(&self) -> usize {
        self.lattice_dim
    }
    fn eval(&self, k: &[f64]) -> CMat {
        (self.f)(k)
    }
    fn lipschitz_bound(&self) -> f64 {
        self.lipschitz
    }
}

/// `W(k) = e^{ik}` as a one-dimensional scalar family.
pub fn scalar_shift_family() -> WalkSymbol {
    let mut t = BTreeMap::new();
    t.insert(vec![1], CMat::from_element(1, 1, ONE));
    WalkSymbol::new(1, 1, t).expect("e^{ik} is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenphases, unitarity_residual, wrap_phase};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn hadamard_at_zero_and_pi() {
        let w = hadamard_walk();
        let h = UnitaryCoin::hadamard();
        assert!(max_abs(&(w.eval1(0.0) - h.matrix())) < 1e-15);
        assert!(max_abs(&(w.eval1(PI) + h.matrix())) < 1e-15);
        assert_eq!(w.terms().len(), 2);
        assert_eq!(w.neighborhood_size(), 1);
    }

    #[test]
    fn hadamard_eigenphases_closed_form() {
        // W_H(p) has eigenvalues λ with λ + det/λ = tr, det = −1, so
        // λ = e^{iω} or −e^{−iω} with sin ω = sin p/√2 ... compare both ways
        let w = hadamard_walk();
        let p = PI / 2.0;
        let m = w.eval1(p);
        let tr = m.trace();
        let det = m.determinant();
        let disc = (tr * tr - det * 4.0).sqrt();
        let mut closed = [((tr + disc) / 2.0).arg(), ((tr - disc) / 2.0).arg()];
        closed.sort_by(f64::total_cmp);
        let dense = eigenphases(&m).unwrap();
        for (a, b) in closed.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
        // tr = i√2 sin p, det = −1: eigenphases solve sin ω = sin p/√2
        for x in dense {
            assert!((x.sin() - p.sin() * FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_walk_odd_dimensions_has_eigenvalues_pm_one() {
        for s in [1usize, 3] {
            let coins = vec![UnitaryCoin::identity(2); s + 1];
            let w = coin_shift_walk(&coins, s).unwrap();
            for i in 0..6 {
                let p: Vec<f64> = (0..s).map(|ax| i as f64 * 0.7 - 2.0 + ax as f64 * 0.3).collect();
                for ph in eigenphases(&w.eval(&p)).unwrap() {
                    assert!(ph.abs() < 1e-12 || (ph.abs() - PI).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn flat_walk_two_dimensions_is_a_diagonal_shift() {
        let coins = vec![UnitaryCoin::identity(2); 3];
        let w = coin_shift_walk(&coins, 2).unwrap();
        for &(a, b) in &[(0.3, -0.2), (1.0, 2.5), (-3.0, 0.1)] {
            let m = w.eval(&[a, b]);
            assert!((m[(0, 0)] - cis(a - b)).norm() < 1e-14);
            assert!((m[(1, 1)] - cis(b - a)).norm() < 1e-14);
            assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);
        }
    }

    #[test]
    fn coin_shift_matches_explicit_product() {
        let coins = vec![UnitaryCoin::x_rotation(0.3), UnitaryCoin::hadamard(), UnitaryCoin::x_rotation(-0.8)];
        let w = coin_shift_walk(&coins, 2).unwrap();
        let sigma = |p: f64| CMat::from_row_slice(2, 2, &[ZERO, cis(p), cis(-p), ZERO]);
        for &(a, b) in &[(0.1, 0.2), (-2.0, 1.3), (3.0, -0.4)] {
            let direct = coins[0].matrix() * sigma(a) * coins[1].matrix() * sigma(b) * coins[2].matrix();
            assert!(max_abs(&(w.eval(&[a, b]) - direct)) < 1e-14);
        }
        assert!(coin_shift_walk(&coins[..2], 2).is_err());
    }

    #[test]
    fn rejects_non_unitary_symbol() {
        let mut t = BTreeMap::new();
        t.insert(vec![1], CMat::identity(2, 2));
        t.insert(vec![-1], CMat::identity(2, 2));
        assert!(WalkSymbol::new(2, 1, t).is_err());
    }

    #[test]
    fn two_particle_symbol_examples() {
        let w = hadamard_walk();
        let h = w.eval1(0.0);
        assert!(max_abs(&(two_particle_symbol(&w, 0.0, 0.0).unwrap() - kron(&h, &h))) < 1e-15);
        let x = two_particle_symbol(&w, PI, PI / 2.0).unwrap();
        assert!(max_abs(&(x - kron(&w.eval1(PI), &w.eval1(0.0)))) < 1e-15);
    }

    #[test]
    fn relative_walk_reproduces_two_particle_symbol() {
        let w = hadamard_walk();
        let p = 0.9;
        let rel = RelativeWalk::new_1d(&w, p).unwrap();
        assert_eq!(rel.stride(), &[2]);
        for i in 0..16 {
            let k = -PI + i as f64 * 0.4;
            let direct = two_particle_symbol(&w, p, k).unwrap();
            let via = rel.eval(&[2.0 * k]);
            assert!(max_abs(&(direct - via)) < 1e-14);
            assert!(unitarity_residual(&rel.eval(&[wrap_phase(2.0 * k)])) < 1e-14);
        }
    }
}
