use thiserror::Error;

use crate::physkit::ValidationReport;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    Invalid(ValidationReport),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "no convergence in {context}: best estimate {best:e}, achieved abs error {abs_error:e}, requested rel tol {rel_tol:e}"
    )]
    NonConvergence {
        context: String,
        best: f64,
        abs_error: f64,
        rel_tol: f64,
    },

    #[error("grid point {index} (value {value:e}) failed: {source}")]
    AtGridPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// The innermost error, skipping grid-point context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtGridPoint { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self.root(), Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
