use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("instance has {n} jobs, above the cap of {cap} for {method}")]
    SizeCap {
        method: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty interval for {what}: [{lower}, {upper}]")]
    DegenerateInterval {
        what: &'static str,
        lower: i64,
        upper: i64,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
