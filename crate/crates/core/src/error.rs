use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    /// A record in an otherwise well-formed input violates a dataset invariant.
    /// `record` names the offending id.
    #[error("invalid record `{record}`: {message}")]
    Validation { record: String, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown topic `{0}`")]
    UnknownTopic(String),

    #[error("CoPA `{copa}` has no {stance} claim")]
    UnknownStance { copa: String, stance: String },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("fold `{motion}`: {source}")]
    Fold {
        motion: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn validation(record: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            record: record.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
