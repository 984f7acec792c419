use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("zero matrix has no Lanczos factorization")]
    ZeroMatrix,

    #[error("invalid rank {rank} for a {rows}x{cols} matrix")]
    InvalidRank { rank: usize, rows: usize, cols: usize },

    #[error("requested rank {rank} exceeds the Krylov dimension {ell}")]
    RankExceedsKrylov { rank: usize, ell: usize },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("spectral gap must be positive (sigma_r = {sigma_r}, sigma_r+1 = {sigma_r1})")]
    NonpositiveGap { sigma_r: f64, sigma_r1: f64 },

    #[error("Lanczos step requested after breakdown or at full dimension")]
    BidiagExhausted,

    #[error("interval union is empty")]
    EmptySet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot sample {requested} entries from a {rows}x{cols} matrix")]
    InfeasibleSampling {
        requested: usize,
        rows: usize,
        cols: usize,
    },

    #[error("observed entries are all zero")]
    ZeroObservations,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, Error>;
