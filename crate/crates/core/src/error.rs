use thiserror::Error;

/// Errors shared by every simulation module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension 2^{qubits} exceeds the supported maximum 2^{limit}")]
    DimensionTooLarge { qubits: u32, limit: u32 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("the strategy made no oracle queries")]
    NoQueries,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
