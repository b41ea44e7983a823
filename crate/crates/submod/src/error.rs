//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SubmodError {
    /// A subset or vector does not live on the expected ground set.
    #[error("ground set mismatch: expected {expected} elements, got {actual}")]
    GroundMismatch { expected: usize, actual: usize },

    /// An element index is outside the ground set.
    #[error("element index {index} out of range for ground set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    /// A spec violated one of its construction invariants.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A matrix expected to be symmetric positive definite is not.
    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    /// A constraint admits no feasible solution for the request.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An iterative procedure hit its iteration cap before meeting its tolerance.
    #[error("did not converge after {iterations} iterations (best gap {best_gap:.3e})")]
    NotConverged { iterations: usize, best_gap: f64 },

    /// A function claimed to be symmetric failed the sampled symmetry check.
    #[error("symmetry check failed: f(A)={lhs} vs f(V\\A)={rhs} on a sampled subset")]
    NotSymmetric { lhs: f64, rhs: f64 },

    /// Input file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SubmodError>;
