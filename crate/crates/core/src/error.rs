use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("target column `{0}` not found")]
    MissingTarget(String),
    #[error("dataset `{id}` has {found} class(es) after load, at least 2 required")]
    TooFewClasses { id: String, found: usize },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse workflow id `{0}`")]
    ParseWorkflowId(String),
    #[error("feature manifest mismatch: model expects {expected}, got {found}")]
    ManifestMismatch { expected: String, found: String },
    #[error("no record for dataset `{dataset}` and workflow `{workflow}`")]
    MissingJoin { dataset: String, workflow: String },
    #[error("malformed file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error("audit failed: {0}")]
    Audit(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
