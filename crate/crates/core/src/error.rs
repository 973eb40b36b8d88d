use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("honest agents always claim their real position")]
    ImpossibleState,

    #[error("malformed witness tree: {0}")]
    MalformedTree(String),

    #[error("value {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("unsupported tree shape for closed-form uniqueness: {0}")]
    UnsupportedShape(String),

    #[error("commitment salt must be non-empty")]
    EmptySalt,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
