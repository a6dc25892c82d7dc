use thiserror::Error;

/// Errors raised while validating inputs or running the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid delay distribution: {0}")]
    InvalidDelay(String),

    #[error("invalid feedback model: {0}")]
    InvalidFeedback(String),

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("{name} out of range: {detail}")]
    OutOfRange { name: &'static str, detail: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("paired rows do not match: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn out_of_range(name: &'static str, detail: impl Into<String>) -> Error {
    Error::OutOfRange {
        name,
        detail: detail.into(),
    }
}
