//! Crate-wide error type.
//!
//! Variants separate "the input makes no sense" from "the input is outside
//! the regime where the requested quantity is meaningful" from "floating
//! point gave up"; front ends map these to distinct exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain (λ ∉ (0,1), w ≤ 0, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// The (n, s) cell is outside the admissible regime, e.g. a = ψ(s) − log n ≤ 0
    /// or s·η(λs) ≥ a, so the requested construction is undefined there.
    #[error("regime error: {0}")]
    Regime(String),

    /// A stated precondition of the operation does not hold for this model.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Numerical failure: quadrature did not converge, grid refinement
    /// disagrees beyond tolerance, or an intermediate overflowed.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A bracketing search exhausted its range without finding a solution.
    #[error("not found: {0}")]
    NotFound(String),

    /// A model or experiment specification failed validation.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
