use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("duplicate document id {id:?} (line {line})")]
    DuplicateId { id: String, line: usize },

    #[error("unsupported language {0:?}")]
    UnsupportedLanguage(String),

    #[error("concept clusters {first:?} and {second:?} share keyword {keyword:?}")]
    OverlappingClusters {
        first: String,
        second: String,
        keyword: String,
    },

    #[error("graph has {nodes} nodes; brute-force oracle accepts at most {max}")]
    GraphTooLarge { nodes: usize, max: usize },

    #[error("malformed input {path}: {message}")]
    Malformed { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Configuration problems map to the CLI's "bad invocation" exit code.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnsupportedLanguage(_) | Error::OverlappingClusters { .. }
        )
    }
}
