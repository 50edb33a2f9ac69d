use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("read failure in {source_id} at line {line_number}: {source}")]
    CorpusRead {
        source_id: String,
        line_number: u64,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: invalid JSON record: {message}")]
    Record {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty training corpus")]
    EmptyCorpus,

    #[error("unknown token id {id} at position {position}")]
    UnknownId { id: u32, position: usize },

    #[error("decoded bytes are not valid UTF-8")]
    InvalidUtf8,

    #[error("incompatible tokenizer families: {0}")]
    IncompatibleTokenizers(String),

    #[error("invalid tokenizer file {path}: {message}")]
    TokenizerFormat { path: PathBuf, message: String },

    #[error("corpus contains no whitespace-delimited words")]
    NoWords,

    #[error("malformed XML at byte offset {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("missing column `{0}` in header")]
    MissingColumn(String),

    #[error("tabular parse error: {0}")]
    Tabular(String),

    #[error("class `{label}` has {count} examples; stratified split needs at least 3")]
    ClassTooSmall { label: String, count: usize },

    #[error("duplicate prediction id `{0}`")]
    DuplicatePrediction(String),

    #[error("prediction id `{0}` has no gold example")]
    UnknownPredictionId(String),

    #[error("gold example `{id}` has label `{label}` outside the task label set")]
    InvalidGoldLabel { id: String, label: String },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("label `{label}` is not valid for task {task}")]
    InvalidLabel { task: String, label: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// An I/O failure on `path`.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
