use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("singular system in batch solve")]
    Singular,

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("write failed: {0}")]
    Output(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },

    #[error("empty series")]
    EmptySeries,

    #[error("price at index {index} is not positive ({value})")]
    NonPositivePrice { index: usize, value: f64 },

    #[error("index range {from}..={to} outside series range {first}..={last}")]
    OutOfRange {
        from: usize,
        to: usize,
        first: usize,
        last: usize,
    },

    #[error("series too short: {needed} samples required (N + L + 1), got {actual}")]
    SeriesTooShort { needed: usize, actual: usize },

    #[error("correlation undefined: zero variance")]
    UndefinedCorrelation,

    #[error("sweep cell (N={n}, L={l}): {reason}")]
    SweepCell { n: usize, l: usize, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
