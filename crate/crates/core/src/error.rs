use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = EchoError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum EchoError {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("no preset registered for {transform}({setting})")]
    PresetNotFound { transform: String, setting: String },

    #[error("{transform} needs a fan mask; run the fan mask extractor (`echoaug fanmask`) first")]
    FanMaskRequired { transform: &'static str },

    #[error("empty mask: {0}")]
    EmptyMask(&'static str),

    #[error("baseline missing: no NONE rows in the results table")]
    BaselineMissing,

    #[error("missing runs for {preset} in cell {cell}: {detail}")]
    MissingRuns {
        preset: String,
        cell: String,
        detail: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error on {path}: {message}")]
    Codec { path: PathBuf, message: String },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl EchoError {
    pub fn validation(msg: impl Into<String>) -> Self {
        EchoError::Validation(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EchoError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 for validation problems, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            EchoError::Io { .. } | EchoError::Codec { .. } => 3,
            EchoError::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => 3,
            _ => 2,
        }
    }
}
