use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input data (loops, out-of-range endpoints, bad parameters).
    #[error("validation: {0}")]
    Validation(String),

    /// An exact solver was asked to run above its configured cap.
    #[error("capacity: {what} has size {size}, exact cap is {cap}")]
    Capacity {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    /// A wiring or embedding is structurally broken.
    #[error("structural: {0}")]
    Structural(String),

    /// A randomized construction ran out of attempts.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    /// A quantity has no closed form for the requested space.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// JSON (de)serialization problems.
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
