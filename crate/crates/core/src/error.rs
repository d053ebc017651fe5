use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: cannot parse token {token:?} as an event id")]
    Parse {
        path: PathBuf,
        line: usize,
        token: String,
    },

    #[error("{0}: input contains no timestamps")]
    EmptySequence(PathBuf),

    #[error("enumerating occurrences of {episode} exceeded the cap of {cap}")]
    EnumerationCap { episode: String, cap: usize },

    #[error("input too large for the brute-force oracle: {0}")]
    OracleScale(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed stats record: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem rather than of the inputs themselves.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
