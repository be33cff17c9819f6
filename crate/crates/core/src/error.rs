//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Matrix or vector shapes do not line up for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix entry is NaN or infinite.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// Not a bijection on the factor positions.
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    /// The four index sets do not form a partition of {1,…,k}.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// An index set mentions positions outside {1,…,k}.
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    /// No factor matrix with the required kernel condition exists.
    #[error("nonexistent: {0}")]
    Nonexistent(String),

    /// Random synthesis exhausted its retry budget; signals checker or
    /// tolerance trouble rather than mathematical impossibility.
    #[error("synthesis-failed: no candidate passed the kernel checker in {attempts} draws")]
    SynthesisFailed { attempts: usize },

    /// Factor matrices rejected by the strict kernel-condition check.
    #[error("invalid-factors: {0}")]
    InvalidFactors(String),

    /// The regrouped map is numerically far from a Kronecker product.
    #[error("not-kronecker: second/first singular value ratio {ratio:.3e} exceeds {tol:.3e}")]
    NotKronecker { ratio: f64, tol: f64 },

    /// Subsystem classification votes disagree; the map is not a preserver
    /// or the tolerances failed.
    #[error("ambiguous-structure: {0}")]
    AmbiguousStructure(String),

    /// An iterative numerical kernel failed to converge.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}
