use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid search bounds in dimension {dimension}: lower {lower} must be below upper {upper}")]
    InvalidBounds {
        dimension: usize,
        lower: f64,
        upper: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("objective returned NaN at iteration {iteration}, agent {agent}, position {position:?}")]
    NanObjective {
        iteration: usize,
        agent: usize,
        position: Vec<f64>,
    },

    #[error("{trainer} loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { trainer: &'static str, epoch: usize },

    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },

    #[error("at least 2 classes are required, found {0}")]
    TooFewClasses(usize),

    #[error("{path}: row {row}, column {column}: {message}")]
    Csv {
        path: String,
        row: usize,
        column: String,
        message: String,
    },

    #[error("unknown dataset `{name}` (valid: {valid})")]
    UnknownDataset { name: String, valid: String },

    #[error("unknown model `{name}` (valid: foxann, ann, logreg)")]
    UnknownModel { name: String },

    #[error("{dataset}/{model} fold {fold}: {source}")]
    Fold {
        dataset: String,
        model: String,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {message}")]
    Format { context: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
