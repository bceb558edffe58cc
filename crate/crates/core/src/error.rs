use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("lexicographic index {index} out of range 1..={max}")]
    IndexOutOfRange { index: u64, max: u64 },

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("row and column sums are not all equal")]
    UnequalLineSums,

    #[error("matrix is not doubly stochastic")]
    NotDoublyStochastic,

    #[error("weight vectors are linearly dependent")]
    DependentWeights,

    #[error("results vector does not sum to zero")]
    ResultNotSumZero,

    #[error("ranking places candidate 1 last; no construction exists for it")]
    ExcludedRanking,

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("n = {n} is outside the supported range {min}..={max}")]
    UnsupportedSize { n: usize, min: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
