//! Error type shared by every module in the crate.

/// Failure modes surfaced by the library.
///
/// `RankDeficient` and `InsufficientDof` identify problems with the design
/// matrix; `InvalidRule` covers malformed selection rules and constraint
/// boxes. Callers that need distinct process exit codes can match on the
/// variant.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("design is rank deficient: {0}")]
    RankDeficient(String),

    #[error("insufficient degrees of freedom: n = {n} must exceed k = {k}")]
    InsufficientDof { n: usize, k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid selection rule: {0}")]
    InvalidRule(String),
}

pub type Result<T> = std::result::Result<T, Error>;
