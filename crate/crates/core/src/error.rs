use thiserror::Error;

/// Failure modes shared by the exact and numeric verification paths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight maps differ between operands")]
    WeightMapMismatch,

    /// The minimal-weight component is not a single monomial.
    #[error("series is not graded-invertible: minimal component {component}")]
    NotInvertible { component: String },

    #[error("substitution makes truncation unsound: {0}")]
    WeightOverflow(String),

    #[error("pole hit: {0}")]
    PoleHit(String),

    #[error("limit undefined: {0}")]
    LimitUndefined(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("point outside the region of convergence: {0}")]
    RegionViolation(String),

    #[error("window did not stabilize: {0}")]
    Unstable(String),

    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
