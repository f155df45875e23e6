use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by fitting, pairing construction and data handling.
#[derive(Debug, Error)]
pub enum AaccaError {
    /// Input has too few samples or is otherwise unusable.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Matrix dimensions do not line up.
    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    /// Cholesky factorization failed; the caller should increase the ridge.
    #[error("matrix is not positive definite; increase the ridge (eps_rel)")]
    NotPositiveDefinite,

    /// All sampled pairwise distances are zero, no usable kernel scale.
    #[error("degenerate kernel scale: sampled pairwise distances are all zero")]
    DegenerateScale,

    /// The same pair was listed with conflicting classes.
    #[error("inconsistent labels for pair ({i}, {j})")]
    InconsistentLabel { i: usize, j: usize },

    /// Not enough points for the requested neighborhood size.
    #[error("insufficient points: need more than k={k} points, got n={n}")]
    InsufficientPoints { n: usize, k: usize },

    /// Grid too small for a typed neighborhood system.
    #[error("degenerate grid: need at least 2x2, got {rows}x{cols}")]
    DegenerateGrid { rows: usize, cols: usize },

    /// No canonical correlation survived the retention floor.
    #[error("no canonical correlation above the floor {floor:e}")]
    NoCorrelation { floor: f64 },

    /// Both classes are required but only one is present.
    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    /// Bad user-supplied configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed text input, located by row and column (1-based).
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Serialized model is malformed or carries an unsupported version.
    #[error("model format error: {0}")]
    ModelFormat(String),
}

impl AaccaError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AaccaError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn shape(expected: impl Into<String>, actual: impl Into<String>) -> Self {
        AaccaError::ShapeMismatch {
            expected: expected.into(),
            actual: actual.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, AaccaError>;
