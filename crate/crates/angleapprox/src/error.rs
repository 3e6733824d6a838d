//! Shared error type for the library.

use thiserror::Error;

/// Errors raised by constructors and operators.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Zero-mean class violation: a nonzero coefficient sits on a hyperplane
    /// `k_j = 0`, which the representation excludes by construction.
    #[error("coefficient at {index:?} has a zero coordinate")]
    ZeroCoordinate { index: Vec<i64> },

    #[error("conjugate symmetry violated at {index:?}")]
    ConjugateSymmetry { index: Vec<i64> },

    #[error("grid axis {axis} undersampled: {n} points, need at least {required}")]
    Undersampled { axis: usize, n: usize, required: usize },

    #[error("invalid Lorentz index p={p}, tau={tau}: need 1 < p < inf, 1 <= tau < inf")]
    InvalidLorentzIndex { p: f64, tau: f64 },

    /// A theorem-side functional was requested outside its stated `(p, τ)`
    /// parameter domain.
    #[error("(p={p}, tau={tau}) outside the parameter domain of {what}")]
    OutsideDomain { what: &'static str, p: f64, tau: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
