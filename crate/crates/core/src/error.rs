use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("axis {axis} out of range for dimension {dim}")]
    InvalidAxis { axis: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative semigroup time {0}")]
    NegativeTime(f64),
    #[error("truncation parameter {0} outside (0, 1]")]
    InvalidEpsilon(f64),
    #[error("grid does not match basis: {0}")]
    GridMismatch(String),
    #[error("quadrature did not converge (error estimate {estimate:e})")]
    Quadrature { estimate: f64 },
    #[error("degenerate proposal: no sample carried weight")]
    DegenerateProposal,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid file: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
