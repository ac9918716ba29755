use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid system configuration: {0}")]
    InvalidConfig(String),

    #[error("infeasible power allocation: {0}")]
    InfeasiblePower(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("matrix is not Hermitian positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("request too large: {0}")]
    TooLarge(String),

    #[error("endpoint not achievable: {0}")]
    UnreachableEndpoint(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}
