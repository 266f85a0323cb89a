use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or analysing a hierarchy.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range (valid: 0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dendrogram: {0}")]
    InvalidDendrogram(String),

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid data table: {0}")]
    InvalidTable(String),

    #[error("clustering needs at least 2 observations, got {0}")]
    TooFewObservations(usize),

    #[error(
        "the {0} criterion is not reducible and cannot run on nearest-neighbor chains; \
         use naive_cluster instead"
    )]
    NotReducible(&'static str),

    #[error("unknown merge criterion {0:?}")]
    UnknownCriterion(String),

    #[error("base {0} is not a prime")]
    NotPrime(u64),

    #[error("unknown node {0}")]
    UnknownNode(String),

    /// Both positions count data cells from 1, ignoring the header and label column.
    #[error("value {value:?} at data row {row}, column {column} is not boolean (0/1)")]
    NotBoolean {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("threshold must be nonnegative, got {0}")]
    NegativeThreshold(f64),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] io::Error),
}
