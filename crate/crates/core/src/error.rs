use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} did not converge (residual {residual:e})")]
    NumericalFailure { what: &'static str, residual: f64 },

    #[error("point {t} lies within the exclusion zone of the pole at {pole}")]
    PoleProximity { pole: f64, t: f64 },

    #[error("coupling constant is zero; the pair spectrum degenerates to straight lines")]
    DegenerateCoupling,

    #[error("({alpha}, {beta}) is not on a spectral curve (residual {residual:e})")]
    InvalidPoint { alpha: f64, beta: f64, residual: f64 },

    #[error("({alpha}, {beta}) lies on a mesh line")]
    OnMeshLine { alpha: f64, beta: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ambiguous collision: real count changed by {change} on [{gamma_lo}, {gamma_hi}]")]
    AmbiguousCollision {
        gamma_lo: f64,
        gamma_hi: f64,
        change: i64,
    },
}
