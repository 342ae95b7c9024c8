use thiserror::Error;

/// Errors raised by the library. Each variant is tagged with the module
/// family that raised it so CLI messages can be traced back.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// `G(x, x)` was requested; the regular part is finite and carried along.
    #[error("singularity error: G(x, y) is infinite for x = y (regular part h = {regular_part})")]
    Singularity { regular_part: f64 },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("contract error: {0}")]
    Contract(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("config error [{key}]: {msg}")]
    Config { key: String, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
