use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Streaming trackers only accept nondecreasing timestamps.
    #[error("out-of-order event at t={t} (last observed t={last})")]
    OutOfOrder { t: f64, last: f64 },

    #[error("unsupported horizon: {0}")]
    UnsupportedHorizon(String),

    #[error("schema version mismatch: file has version {found}, this build reads version {expected}")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("malformed record at line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    /// Stable, machine-parsable error class used by the command-line surface.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::InsufficientData(_) => "insufficient-data",
            Error::OutOfOrder { .. } => "out-of-order",
            Error::UnsupportedHorizon(_) => "unsupported-horizon",
            Error::SchemaVersion { .. } => "schema-version",
            Error::Malformed { .. } => "malformed-record",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Serialization(_) => "serialization",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
