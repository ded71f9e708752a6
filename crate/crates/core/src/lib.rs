//! Interacting two-particle discrete-time quantum walks.
//!
//! Walk construction and evolution live in [`symbol`], [`coin`], [`state`] and
//! [`step`]. [`spectral`] computes defect operators and ring spectra,
//! [`molecule`] the closed-form bound-state results for the Hadamard walk with
//! singlet collisions, and [`qca`] the lattice-gas automaton.

// Tolerance checks are written `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coin;
pub mod error;
pub mod linalg;
pub mod molecule;
pub mod qca;
pub mod spectral;
pub mod state;
pub mod step;
pub mod symbol;

pub use coin::UnitaryCoin;
pub use error::{Result, WalkError};
pub use linalg::{CMat, CVec, C64};
pub use molecule::{BoundStateRecord, Branch, DispersionPoint, InteractionPhase};
pub use state::{singlet_state_at_origin, JointDistribution, Lattice, TwoParticleState};
pub use step::{build_free_step, build_interacting_step, evolve, StepOperator};
pub use symbol::{coin_shift_walk, hadamard_walk, two_particle_symbol, RelativeWalk, UnitaryFamily, WalkSymbol};
