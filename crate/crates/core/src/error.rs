use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("missing value at line {line}, column `{column}`")]
    MissingValue { line: u64, column: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("empty sample")]
    EmptySample,

    #[error("density model is degenerate (zero bandwidth)")]
    DegenerateDensity,

    #[error("sample is degenerate: {0}")]
    DegenerateSample(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
