use thiserror::Error;

/// Errors produced by the exact-arithmetic kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("undefined ground set")]
    UndefinedGroundSet,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("objects live over different ground sets")]
    GroundSetMismatch,

    #[error("class is not integral: {0}")]
    NonIntegralClass(String),

    #[error("fan check failed: {0}")]
    FanCheck(String),

    #[error("rays do not span a cone of the fan")]
    NotACone,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
