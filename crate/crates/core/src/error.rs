//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root bracket does not change sign.
    #[error("invalid bracket [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// An iterative method hit its iteration limit.
    #[error("no convergence after {iterations} iterations (last estimate {estimate})")]
    Convergence { iterations: usize, estimate: f64 },

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },

    /// Vectors or parameters with inconsistent shapes.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An invalid system configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A requested combination the model does not cover.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Input that makes an estimator undefined.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A precondition on call arguments failed.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Result alias using [`Error`].
pub type Result<T> = std::result::Result<T, Error>;
