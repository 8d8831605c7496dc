use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: file contains no data")]
    EmptyFile { path: PathBuf },

    #[error("{path}:{line}: expected {expected} components, found {found}")]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid relation schema: {0}")]
    Schema(String),

    #[error("invalid knowledge graph: {0}")]
    Graph(String),

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("could not find a negative example for ({rel}, {head}, {tail})")]
    CorruptionExhausted {
        rel: String,
        head: String,
        tail: String,
    },

    #[error("triple {index} has no label")]
    MissingLabel { index: usize },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Shape { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{0} requires at least {1} instance(s)")]
    TooFew(&'static str, usize),

    #[error("model artifact: {0}")]
    Artifact(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
