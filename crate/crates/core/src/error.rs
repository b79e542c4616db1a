use thiserror::Error;

/// Errors raised by the transform library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("squeeze parameter r must be strictly positive, got {0}")]
    NonPositiveSqueeze(f64),
    #[error("Planck constant must be strictly positive, got {0}")]
    NonPositiveHbar(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unequal grid spacings: {0} vs {1}")]
    UnequalSpacing(f64, f64),
    #[error("window overflow: {0}")]
    WindowOverflow(String),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("hermite index {0} exceeds the supported maximum {1}")]
    HermiteIndexTooLarge(usize, usize),
    #[error("polynomial degree {0} exceeds the supported maximum {1}")]
    DegreeTooLarge(usize, usize),
    #[error("invalid fiducial spec: {0}")]
    InvalidSpec(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("slice (b={b}, r={r}) is not present in the supplied data")]
    MissingSlice { b: f64, r: f64 },
    #[error("missing finite-difference stencil: {0}")]
    MissingStencil(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
