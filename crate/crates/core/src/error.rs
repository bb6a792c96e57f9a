use thiserror::Error;

/// Errors shared across the computation modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An adaptive integration exhausted its subdivision budget. The best
    /// estimate obtained so far is carried along with its error estimate.
    #[error("quadrature did not converge: estimate {estimate:e} +- {error_estimate:e} after {evaluations} evaluations")]
    QuadratureNonConvergence {
        estimate: f64,
        error_estimate: f64,
        evaluations: u64,
    },

    /// A Fock-space model would exceed the configured resource guard.
    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),

    /// A numerical invariant (trace, Hermiticity, positivity) was violated
    /// beyond tolerance during evolution.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
