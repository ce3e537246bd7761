//! Shared error type for validation and numerical failures.

use thiserror::Error;

/// Errors surfaced by constructors and operations in this crate.
///
/// Domain and parameter violations are reported eagerly at construction or
/// call time; quadrature failures carry enough context to tell a divergent
/// integrand apart from a tolerance miss.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// A parameter violates a structural precondition (e.g. a coupling
    /// denominator vanishing, a non-positive scale).
    #[error("parameter error: {0}")]
    Parameter(&'static str),

    /// Paired inputs disagree in length.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// An input collection was empty where at least one element is required.
    #[error("empty input")]
    Empty,

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),

    /// A probability vector does not sum to one within tolerance.
    #[error("not normalized: sum = {sum}")]
    NotNormalized { sum: f64 },

    /// A probability or weight entry lies outside its admissible range.
    #[error("out of range: {0}")]
    OutOfRange(&'static str),

    /// An integral failed to converge or grew past the divergence guard.
    #[error("divergent or non-convergent integral: {0}")]
    Divergent(&'static str),

    /// A matrix expected to be symmetric positive definite was not.
    #[error("matrix not positive definite")]
    NotPositiveDefinite,
}

pub type Result<T> = std::result::Result<T, Error>;
