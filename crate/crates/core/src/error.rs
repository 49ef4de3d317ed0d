//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by corpus loading, indexing, fusion, reranking and
/// evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("duplicate doc_id '{0}'")]
    DuplicateDocId(String),

    #[error("duplicate query_id '{0}'")]
    DuplicateQueryId(String),

    #[error("query '{query_id}' references unknown doc_id '{doc_id}'")]
    UnknownGroundTruth { query_id: String, doc_id: String },

    #[error("corpus has no records")]
    EmptyCorpus,

    #[error("dictionary is empty")]
    EmptyDictionary,

    #[error("gram length mismatch: expected n={expected}, got n={got}")]
    GramLengthMismatch { expected: usize, got: usize },

    #[error("similarity {0} outside [0, 1]")]
    SimilarityOutOfRange(f64),

    #[error("{channels} channels but {weights} weights")]
    ChannelCountMismatch { channels: usize, weights: usize },

    #[error("no training pairs could be constructed")]
    NoTrainingPairs,

    #[error("non-finite feature value for query '{query_id}', doc '{doc_id}'")]
    NonFiniteFeature { query_id: String, doc_id: String },

    #[error("unknown query_id '{0}'")]
    UnknownQuery(String),

    #[error("no ranking for query '{0}'")]
    MissingRanking(String),

    #[error("k={k} outside curve range [{min}, {max}]")]
    KOutOfRange { k: usize, min: usize, max: usize },

    #[error("need at least {need} queries, got {got}")]
    TooFewQueries { need: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Coarse category used by callers that map errors to exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
            Error::Config(_) | Error::EmptyDictionary => "config",
            _ => "data",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
