use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector has zero norm")]
    ZeroNorm,

    #[error("vector component {index} is not finite")]
    NonFinite { index: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("k must be at least 1")]
    ZeroK,

    #[error("k = {k} exceeds the {available} available candidates")]
    KTooLarge { k: usize, available: usize },

    #[error("lambda must lie in [0, 1], got {0}")]
    InvalidLambda(f64),

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("enumeration needs {required} subsets but the cap is {cap}")]
    EnumerationCapExceeded { required: u128, cap: u128 },

    #[error("query vector is zero")]
    ZeroQuery,

    #[error("instance has {size} elements; brute force supports at most {max}")]
    InstanceTooLarge { size: usize, max: usize },

    #[error("invalid subset-sum instance: {0}")]
    InvalidInstance(String),

    #[error("selection is not a certificate: {0}")]
    NotACertificate(String),

    #[error("query {query_id:?} has no score for {tag:?}")]
    MissingTag { query_id: String, tag: String },

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("invalid run config: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: vector has zero norm")]
    ZeroNormRecord { path: PathBuf, line: usize },

    #[error("{path}: line {line} has dimension {found} but line {first_line} has {expected}")]
    LineDimensionMismatch {
        path: PathBuf,
        first_line: usize,
        expected: usize,
        line: usize,
        found: usize,
    },

    #[error("query {query_id:?}: {source}")]
    Query {
        query_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
