use thiserror::Error;

/// Errors surfaced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bit-stream length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no configuration for {function} / {variant} at N={n}")]
    ConfigNotFound {
        function: String,
        variant: String,
        n: usize,
    },

    #[error("input outside the supported domain: {0}")]
    Domain(String),

    #[error("malformed configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
