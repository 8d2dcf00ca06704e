use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point index {index} out of range for space of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed number {0:?}")]
    BadNumber(String),

    #[error("space is empty after dropping zero-mass points")]
    EmptySpace,

    #[error("eigensolver did not converge: {found} of {requested} eigenpairs after {iterations} Lanczos steps")]
    NonConvergence { requested: usize, found: usize, iterations: usize, partial: Vec<f64> },

    #[error("basis is rank deficient: rank {rank} < {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("subset enumeration over {size} support points exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
