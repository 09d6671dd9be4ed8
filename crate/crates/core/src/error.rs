use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The variants are coarse on purpose: callers (the CLI in particular) map
/// them to exit codes, and the message carries the specifics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Argument inside the domain but outside the range a routine supports.
    #[error("range error: {0}")]
    Range(String),
    /// A documented precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An iteration did not reach its tolerance.
    #[error("convergence failure: {message}")]
    Convergence {
        message: String,
        /// Residual norm after each iteration, oldest first.
        history: Vec<f64>,
        /// Last iterate, when the iteration has one.
        last_iterate: Vec<f64>,
    },
    /// A self-convergence or accuracy check failed.
    #[error("accuracy check failed: {0}")]
    Accuracy(String),
    /// An internal invariant was violated; signals a bug or a bad input state.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    /// The geometry degenerated (collision, crossing nodes, vanishing area).
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

