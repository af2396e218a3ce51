use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix must have at least one row and one column")]
    Empty,

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("ragged block grid: {0}")]
    RaggedBlocks(String),

    #[error("eigenvalue iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),

    #[error("numerical degradation: {0}")]
    Degraded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inconsistent-affine: residual {residual:.3e} exceeds {tolerance:.3e}")]
    InconsistentAffine { residual: f64, tolerance: f64 },

    #[error("non-finite iterate at iteration {0}")]
    NonFiniteIterate(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
