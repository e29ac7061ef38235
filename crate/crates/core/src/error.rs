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

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("document `{id}` refers to missing parent `{parent}`")]
    MissingParent { id: String, parent: String },

    #[error("corpus `{0}` has no documents")]
    EmptyCorpus(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite numeric value {0}")]
    NonFinite(f64),

    #[error("no synonym pair is covered by the vector file ({skipped} pairs skipped)")]
    NoCoveredPairs { skipped: usize },

    #[error("vocabulary is empty (min_count = {min_count})")]
    EmptyVocabulary { min_count: usize },

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("no vector for: {}", .0.join(", "))]
    MissingVectors(Vec<String>),

    #[error("score tables cover different (query, target) pairs: {0}")]
    CoverageMismatch(String),

    #[error("query `{0}` has no ground-truth entry")]
    MissingTruth(String),

    #[error("no taxonomy path for target `{0}`")]
    MissingPath(String),

    #[error("empty taxonomy path")]
    EmptyPath,

    #[error("stage `{stage}` needs {artifact}; run {run_first} first")]
    MissingArtifact {
        stage: &'static str,
        artifact: String,
        run_first: &'static str,
    },
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
