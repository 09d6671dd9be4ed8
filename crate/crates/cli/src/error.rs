//! CLI failures and their exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] karman_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("violated invariants: {}", .0.join(", "))]
    Assertion(Vec<String>),
}

impl CliError {
    /// 2 for bad input, 3 for convergence failure, 4 for failed internal checks.
    pub fn exit_code(&self) -> i32 {
        use karman_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::Core(e) => match e {
                E::Domain(_) | E::Range(_) | E::Precondition(_) | E::Degenerate(_) => 2,
                E::Convergence { .. } => 3,
                E::Accuracy(_) | E::Consistency(_) => 4,
            },
            CliError::Assertion(_) => 4,
        }
    }
}
