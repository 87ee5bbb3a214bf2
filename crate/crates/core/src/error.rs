use thiserror::Error;

/// Failure classes shared by the library, the CLI exit codes and the C ABI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("model discrepancy: {0}")]
    ModelDiscrepancy(String),
    #[error("not a sublattice: {0}")]
    NotSublattice(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("i/o or parse error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 2,
            Error::ModelDiscrepancy(_) | Error::NotSublattice(_) | Error::Internal(_) => 3,
            Error::InvalidInput(_) | Error::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::Validation(_) => "VALIDATION",
            Error::ModelDiscrepancy(_) => "MODEL_DISCREPANCY",
            Error::NotSublattice(_) => "NOT_SUBLATTICE",
            Error::Internal(_) => "INTERNAL_ERROR",
            Error::Io(_) => "IO",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn discrepancy<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::ModelDiscrepancy(msg.into()))
}
