use thiserror::Error;

/// Errors raised by walk construction, evolution and spectral analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("matrix is not unitary: residual {residual:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch { expected: usize, actual: usize, context: &'static str },

    #[error("window clearance violated: need {required} sites, window radius is {available}")]
    ClearanceViolated { required: usize, available: usize },

    #[error("amplitude reached the window boundary at site {site}")]
    AmplitudeAtBoundary { site: i64 },

    #[error("spectral parameter lies {distance:.3e} from the band (minimum {minimum:.1e})")]
    SpectralProximity { distance: f64, minimum: f64 },

    #[error("defect operator is numerically singular (condition number {condition:.3e})")]
    SingularDefect { condition: f64 },

    #[error("branch {branch} is forbidden at p={p}, g={g}: sin(w)*sin(g-w) = {constraint:.3e} is not positive")]
    ForbiddenBranch { branch: &'static str, p: f64, g: f64, constraint: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical consistency check failed: {0}")]
    Consistency(String),

    #[error("eigen decomposition did not converge for a {0}x{0} matrix")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, WalkError>;
