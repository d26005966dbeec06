//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field shape {found} does not match grid shape {expected}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("operation `{op}` is not supported on {geometry} geometry")]
    UnsupportedGeometry { op: &'static str, geometry: &'static str },

    #[error("geometry mismatch between operands")]
    GeometryMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("operation undefined on the zero field")]
    ZeroField,

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("mass not preserved: relative change {drift:e} exceeds tolerance {tol:e}")]
    MassNotPreserved { drift: f64, tol: f64 },

    #[error("run aborted: {0}")]
    RunAborted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
