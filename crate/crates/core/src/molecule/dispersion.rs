//! Molecule dispersion for the Hadamard walk with singlet collisions.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::coin::UnitaryCoin;
use crate::error::Result;
use crate::linalg::{cis, wrap_phase, CMat, C64, ONE};
use crate::symbol::{coin_walk, WalkSymbol};

/// Values of `sin ω · sin(g − ω)` at or below this are treated as forbidden.
pub const CONSTRAINT_TIE: f64 = 1e-12;

/// `γ = e^{ig}` with `g` wrapped into `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionPhase {
    pub g: f64,
    pub gamma: C64,
}

impl InteractionPhase {
    pub fn new(g: f64) -> Self {
        let g = wrap_phase(g);
        Self { g, gamma: cis(g) }
    }
}

/// `Plus` is the root with `+i√(sin²p + 4(1 − cos g))` inside the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub p: f64,
    pub branch: Branch,
    pub omega: f64,
    pub allowed: bool,
    pub group_velocity: f64,
}

/// `e^{iω} = γ/(2γ − 1) · (cos p ± i√(sin²p + 4(1 − cos g)))`.
pub fn eigenvalue(p: f64, g: f64, branch: Branch) -> C64 {
    let gamma = cis(g);
    let root = (p.sin().powi(2) + 4.0 * (1.0 - g.cos())).sqrt();
    gamma / (gamma * 2.0 - ONE) * C64::new(p.cos(), branch.sign() * root)
}

pub fn omega(p: f64, g: f64, branch: Branch) -> f64 {
    wrap_phase(eigenvalue(p, g, branch).arg())
}

/// `sin ω · sin(g − ω)`.
pub fn constraint(omega: f64, g: f64) -> f64 {
    omega.sin() * (g - omega).sin()
}

pub fn is_allowed(p: f64, g: f64, branch: Branch) -> bool {
    constraint(omega(p, g, branch), g) > CONSTRAINT_TIE
}

/// Both branches at `(p, g)`. At `g = 0` both come back forbidden.
pub fn dispersion(p: f64, g: f64) -> [DispersionPoint; 2] {
    Branch::BOTH.map(|branch| {
        let w = omega(p, g, branch);
        DispersionPoint {
            p,
            branch,
            omega: w,
            allowed: constraint(w, g) > CONSTRAINT_TIE,
            group_velocity: group_velocity(p, g, branch),
        }
    })
}

/// `dω/dp = ± sin p / √(4 − 4cos g + sin²p)`, for real or virtual branches.
pub fn group_velocity(p: f64, g: f64, branch: Branch) -> f64 {
    let den = (4.0 - 4.0 * g.cos() + p.sin().powi(2)).sqrt();
    if den == 0.0 {
        return 0.0;
    }
    branch.sign() * p.sin() / den
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxSpeed {
    /// Largest `|dω/dp|` over allowed branches on the scan grid.
    pub speed: f64,
    pub at_p: f64,
    /// `1/√(5 − 4cos g)`, the value at `p = π/2` ignoring the constraint.
    pub unconstrained: f64,
    /// Whether some branch is allowed at `p = π/2`.
    pub unconstrained_allowed: bool,
}

/// Scans `grid` momenta; `p = ±π/2` are always included.
pub fn max_speed(g: f64, grid: usize) -> MaxSpeed {
    let unconstrained = 1.0 / (5.0 - 4.0 * g.cos()).sqrt();
    let mut ps: Vec<f64> = (0..grid).map(|j| -PI + 2.0 * PI * j as f64 / grid as f64).collect();
    ps.extend([FRAC_PI_2, -FRAC_PI_2]);
    let mut best = (0.0, 0.0);
    for &p in &ps {
        for b in Branch::BOTH {
            if is_allowed(p, g, b) {
                let v = if p == FRAC_PI_2 || p == -FRAC_PI_2 { unconstrained } else { group_velocity(p, g, b).abs() };
                if v > best.0 {
                    best = (v, p);
                }
            }
        }
    }
    let unconstrained_allowed = Branch::BOTH.iter().any(|&b| is_allowed(FRAC_PI_2, g, b));
    MaxSpeed { speed: best.0, at_p: best.1, unconstrained, unconstrained_allowed }
}

/// `C = 1/(2γ − 1) · [[γ, √2(γ − 1)], [√2(γ − 1)γ, γ]]`.
pub fn molecule_coin(gamma: C64) -> Result<UnitaryCoin> {
    let pre = ONE / (gamma * 2.0 - ONE);
    let off = (gamma - ONE) * SQRT_2;
    let m = CMat::from_row_slice(2, 2, &[gamma * pre, off * pre, off * gamma * pre, gamma * pre]);
    UnitaryCoin::new(m)
}

/// Single-particle walk `S(p) · C_mol` whose two eigenphases trace both branches.
pub fn virtual_walk(gamma: C64) -> Result<WalkSymbol> {
    coin_walk(&molecule_coin(gamma)?)
}
