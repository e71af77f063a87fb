use thiserror::Error;

/// Errors shared by every construction and decision procedure in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed vertex map: {0}")]
    MalformedMap(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    Budget { what: String, needed: u64, cap: u64 },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unknown {kind}: {name}")]
    Unknown { kind: String, name: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn budget(what: impl Into<String>, needed: u64, cap: u64) -> Self {
        Error::Budget {
            what: what.into(),
            needed,
            cap,
        }
    }
}
