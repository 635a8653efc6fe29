//! Crate-wide error type.

use crate::linalg::EigenEstimate;
use crate::solver::IterateTrace;

/// Errors produced by the solver library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Vector/matrix dimensions do not line up.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An iterative eigenvalue estimate did not reach the requested
    /// residual within the iteration budget. Carries the best estimate.
    #[error(
        "power iteration did not converge: best value {value:.6e} with residual {residual:.3e} \
         after {iterations} iterations",
        value = best.value,
        residual = best.residual,
        iterations = best.iterations
    )]
    Convergence { best: EigenEstimate },

    /// A numerical evaluation produced a non-finite quantity.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A solve aborted mid-run; the partial trace is preserved.
    #[error("solve failed at iteration {iteration}: {message}")]
    SolveFailed {
        iteration: usize,
        message: String,
        trace: Box<IterateTrace>,
    },

    /// The requested configuration is inconsistent (e.g. a duality-gap
    /// termination rule on a problem without a dual).
    #[error("configuration error: {0}")]
    Config(String),

    /// Not enough data points for the requested computation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
