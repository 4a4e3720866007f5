use thiserror::Error;

/// Errors raised by the exact and numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a positive integer, got {0}")]
    NonPositive(i128),
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: String, m: String },
    #[error("{s} is not an exact divisor of {d}")]
    InvalidLevel { d: u64, s: u64 },
    #[error("determinant identity a*e*s - b*c*(d/s) = 1 fails (got {0})")]
    InvalidDeterminant(String),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("closure violation in coset product: {0}")]
    InternalClosureViolation(String),
    #[error("matrix does not preserve the Gram matrix of N_{0}")]
    NotAnIsometry(u64),
    #[error("matrix has non-integral entries")]
    NotIntegral,
    #[error("isometry does not act diagonally on the discriminant group: {0}")]
    ActionNotDiagonal(String),
    #[error("representation produced a non-integral matrix: {0}")]
    IntegralityViolation(String),
    #[error("matrix is not the image of any Atkin-Lehner element: {0}")]
    NotInImage(String),
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("point is not in the upper half plane (v = {0})")]
    NotInUpperHalfPlane(f64),
    #[error("numerical pole")]
    NumericalPole,
    #[error("rank must be nonzero")]
    ZeroRank,
}

pub type Result<T> = std::result::Result<T, Error>;
