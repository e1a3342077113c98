use thiserror::Error;

/// Errors produced by ingestion, model loading and evaluation.
#[derive(Debug, Error)]
pub enum CcdpError {
    #[error("malformed headers: {0}")]
    MalformedHeaders(String),

    #[error("unparseable or missing date: {0}")]
    UnparseableDate(String),

    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },

    #[error("malformed vector file at line {line}: {message}")]
    MalformedVectorFile { line: usize, message: String },

    #[error("word vector dimension mismatch: expected {expected}, got {actual}")]
    ModelDimensionMismatch { expected: usize, actual: usize },

    #[error("score {value} out of [0,1] at row {row}")]
    OutOfRangeScore { row: usize, value: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("gold standard and calculated proximities disagree on pairs: {0:?}")]
    KeyMismatch(Vec<String>),

    #[error("gold standard mean is zero, cannot scale")]
    ZeroGoldMean,

    #[error("unknown message id: {0}")]
    UnknownMessage(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CcdpError>;
