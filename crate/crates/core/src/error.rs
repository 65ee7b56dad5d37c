use thiserror::Error;

/// Errors raised by the numerical routines and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root finder could not locate a sign change.
    #[error("no bracketing sign change: {0}")]
    NoBracket(String),

    /// An iterative method exhausted its budget.
    #[error("did not converge: {0}")]
    NonConvergence(String),

    /// The requested endpoint is not reachable by the contact parametrization.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// A structural assumption checked at runtime failed.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 1 for domain and validation problems, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoBracket(_)
            | Error::NonConvergence(_)
            | Error::NoSolution(_)
            | Error::Invariant(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
