use thiserror::Error;

/// Failure outcomes shared by every module.
///
/// The CLI maps `Unsupported` and `NoAdmissibleMap` to exit code 2, `CapExceeded`
/// to exit code 3 and `Parse` to exit code 4.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("no admissible congruence map: {0}")]
    NoAdmissibleMap(String),
    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: String, cap: u64 },
    #[error("not invertible: {0}")]
    NotInvertible(String),
    /// A computed certificate failed its own check.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn cap(what: impl Into<String>, cap: u64) -> Self {
        Error::CapExceeded { what: what.into(), cap }
    }
}
