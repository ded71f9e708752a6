//! Closed-form molecule results for the Hadamard walk with singlet collisions.

pub mod bound;
pub mod capture;
pub mod dispersion;

pub use bound::{bound_state, capture_closed_form, eta, pole_v1, singlet_norm_squared, BoundStateRecord};
pub use capture::{
    asymptotic_distribution, capture_probability, capture_probability_quadrature, integrated_capture, norm_squared,
    VelocityHistogram,
};
pub use dispersion::{
    constraint, dispersion, eigenvalue, group_velocity, is_allowed, max_speed, molecule_coin, omega, virtual_walk,
    Branch, DispersionPoint, InteractionPhase, MaxSpeed,
};
