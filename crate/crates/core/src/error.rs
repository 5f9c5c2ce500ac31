use std::path::PathBuf;

use thiserror::Error;

use crate::model::FieldKey;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{source_name}:{line}: {message}")]
    Malformed {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("normalized key {key:?} maps to both {first:?} and {second:?}")]
    DictionaryCollision {
        key: String,
        first: String,
        second: String,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training set must contain both labels (got {0} examples of a single class)")]
    SingleClass(usize),

    #[error("feature arity {got} does not match model arity {expected}")]
    Arity { expected: usize, got: usize },

    #[error("name judge failed: {0}")]
    Judge(String),

    #[error("similarity provider failed: {0}")]
    Similarity(String),

    #[error("extraction oracle failed for record {record_id}: {message}")]
    Oracle { record_id: String, message: String },

    #[error("unparseable date: {0:?}")]
    UnparseableDate(String),

    #[error("journal {0} is locked by another writer")]
    StoreBusy(PathBuf),

    #[error("unknown record id {0:?}")]
    UnknownRecord(String),

    #[error("record {record_id:?} has no version {version}")]
    UnknownVersion { record_id: String, version: u32 },

    #[error("journal corrupted at line {line}: {message}")]
    CorruptJournal { line: usize, message: String },

    #[error("report is missing the {0} row")]
    MissingReportRow(FieldKey),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
