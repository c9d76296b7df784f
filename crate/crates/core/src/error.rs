//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library.
///
/// Internal consistency failures (e.g. a stabilizer group product landing on
/// an imaginary phase) are bugs, not user errors, and panic instead.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is malformed (bad length, zero qubits, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input does not describe a physical state in the way the operation
    /// requires (trace/identity component off, Hermiticity violated, ...).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A size guard refused the request. The message names the cap and, where
    /// one exists, the cheaper alternative.
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    /// A binary or JSON state file failed to parse. `offset` is the byte
    /// position at which the reader gave up.
    #[error("format error at byte {offset}: {what}")]
    Format { offset: u64, what: String },

    /// The linear program has no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An iteration limit was hit before the solver converged.
    #[error("iteration limit: {0}")]
    IterationLimit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn invalid_state(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }

    pub fn cap(msg: impl Into<String>) -> Self {
        Error::CapExceeded(msg.into())
    }
}
