use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    Dimension {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("degenerate weights: {0}")]
    DegenerateWeights(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training diverged at epoch {epoch}: {what}")]
    Divergence { what: String, epoch: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported format version {found} (expected {expected})")]
    UnsupportedVersion { found: u16, expected: u16 },

    #[error("data error at row {row}, column {col}: {msg}")]
    Data { row: usize, col: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl GeomError {
    /// Errors caused by bad input or configuration, as opposed to failures
    /// while running (IO, divergence).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            GeomError::Dimension { .. }
                | GeomError::DegenerateWeights(_)
                | GeomError::Config(_)
                | GeomError::Format(_)
                | GeomError::UnsupportedVersion { .. }
                | GeomError::Data { .. }
                | GeomError::Json(_)
                | GeomError::Csv(_)
        )
    }
}
