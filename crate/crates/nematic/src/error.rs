use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. The CLI maps variants onto exit codes:
/// config errors -> 2, numeric aborts -> 3, missing inputs -> 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("numeric abort: {0}")]
    Numeric(String),

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Invalid(_) => 2,
            Error::Numeric(_) => 3,
            Error::MissingInput(_) => 4,
            Error::Format { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
