use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left} vs {right}")]
    Dimension {
        op: &'static str,
        left: String,
        right: String,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite gradient in parameter `{0}`")]
    NonFiniteGradient(String),

    #[error("loss function is not deterministic: {first} != {second}")]
    NonDeterministicLoss { first: f64, second: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("rank-deficient design matrix (condition estimate {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("explosive dynamics at t={step}: |y|={value:.3e} exceeds 1e12")]
    Explosive { step: usize, value: f64 },

    #[error("LSTAR estimation failed: regressor matrix singular at every grid point")]
    EstimationFailed,

    #[error("zero-variance input cannot be standardized")]
    ZeroVariance,

    #[error("series too short: need at least {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("column `{column}` not found; available columns: {available:?}")]
    MissingColumn {
        column: String,
        available: Vec<String>,
    },

    #[error("line {line}: cannot parse timestamp `{value}`")]
    Timestamp { line: usize, value: String },

    #[error("line {line}: cannot parse value `{value}`")]
    Value { line: usize, value: String },

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("training diverged: loss {loss:.3e} at step {step}")]
    Diverged { step: usize, loss: f64 },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(op: &'static str, left: impl Into<String>, right: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            left: left.into(),
            right: right.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
