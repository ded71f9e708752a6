//! Unitary coins with a construction-time unitarity check.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, WalkError};
use crate::linalg::{kron, unitarity_residual, CMat, CVec, C64, I, ONE, ZERO};

/// Tolerance on `‖U†U − 1‖_max` accepted by [`UnitaryCoin::new`].
pub const UNITARITY_TOL: f64 = 1e-12;

/// A dense `d×d` unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryCoin {
    matrix: CMat,
}

impl UnitaryCoin {
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_tolerance(matrix, UNITARITY_TOL)
    }

    pub fn with_tolerance(matrix: CMat, tolerance: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(WalkError::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
                context: "coin must be square and non-empty",
            });
        }
        let residual = unitarity_residual(&matrix);
        if !(residual <= tolerance) {
            return Err(WalkError::NotUnitary { residual, tolerance });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: CMat::identity(d, d) }
    }

    /// `(1/√2)[[1,1],[1,−1]]`.
    pub fn hadamard() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self { matrix: CMat::from_row_slice(2, 2, &[h, h, h, -h]) }
    }

    /// `γ·1` on a `d`-dimensional space.
    pub fn phase(gamma: C64, d: usize) -> Result<Self> {
        Self::new(CMat::identity(d, d) * gamma)
    }

    /// `1 + (γ−1)|ψ₋⟩⟨ψ₋|` on the two-qubit collision space.
    pub fn singlet_phase(gamma: C64) -> Result<Self> {
        let s = singlet_vector();
        Self::new(CMat::identity(4, 4) + (&s * s.adjoint()) * (gamma - ONE))
    }

    /// `exp(iεX) = cos ε · 1 + i sin ε · X`.
    pub fn x_rotation(eps: f64) -> Self {
        let c = C64::new(eps.cos(), 0.0);
        let s = I * eps.sin();
        Self { matrix: CMat::from_row_slice(2, 2, &[c, s, s, c]) }
    }

    /// Haar-distributed unitary from QR of a complex Ginibre matrix.
    pub fn haar_random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let g = CMat::from_fn(d, d, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im) * FRAC_1_SQRT_2
        });
        let (mut q, r) = g.qr().unpack();
        for j in 0..d {
            let rjj = r[(j, j)];
            let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
        Self::with_tolerance(q, 1e-10).expect("QR factor is unitary")
    }

    pub fn kron(&self, other: &UnitaryCoin) -> UnitaryCoin {
        UnitaryCoin { matrix: kron(&self.matrix, &other.matrix) }
    }

    pub fn adjoint(&self) -> UnitaryCoin {
        UnitaryCoin { matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, other: &UnitaryCoin) -> Result<UnitaryCoin> {
        if self.dim() != other.dim() {
            return Err(WalkError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
                context: "coin composition",
            });
        }
        Ok(UnitaryCoin { matrix: &self.matrix * &other.matrix })
    }

    /// Swap the two tensor factors of a `d²`-dimensional coin.
    pub fn exchanged(&self) -> Result<UnitaryCoin> {
        let f = swap_operator(self.tensor_root()?);
        Ok(UnitaryCoin { matrix: &f * &self.matrix * &f })
    }

    /// True when the coin commutes with the tensor-factor swap.
    pub fn commutes_with_exchange(&self, tol: f64) -> Result<bool> {
        let f = swap_operator(self.tensor_root()?);
        let c = &f * &self.matrix - &self.matrix * &f;
        Ok(crate::linalg::max_abs(&c) <= tol)
    }

    fn tensor_root(&self) -> Result<usize> {
        let n = self.dim();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n {
            return Err(WalkError::InvalidParameter(format!("coin of dimension {n} is not a two-particle coin")));
        }
        Ok(d)
    }
}

/// `(|↑↓⟩ − |↓↑⟩)/√2` with ↑ = 0, ↓ = 1 and particle one major.
pub fn singlet_vector() -> CVec {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    CVec::from_vec(vec![ZERO, h, -h, ZERO])
}

/// `(|↑↓⟩ + |↓↑⟩)/√2`.
pub fn triplet_zero_vector() -> CVec {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    CVec::from_vec(vec![ZERO, h, h, ZERO])
}

/// Isometry from the symmetric subspace basis `(|↑↑⟩, sym, |↓↓⟩)` into the collision space.
pub fn symmetric_basis() -> CMat {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut b = CMat::zeros(4, 3);
    b[(0, 0)] = ONE;
    b[(1, 1)] = h;
    b[(2, 1)] = h;
    b[(3, 2)] = ONE;
    b
}

/// Tensor-factor exchange `F|αβ⟩ = |βα⟩` on `ℂ^d ⊗ ℂ^d`.
pub fn swap_operator(d: usize) -> CMat {
    let mut f = CMat::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            f[(b * d + a, a * d + b)] = ONE;
        }
    }
    f
}
