//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any stage of the pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("unsupported manifold: {0}")]
    UnsupportedManifold(String),

    #[error("no analytic oracle for manifold: {0}")]
    UnsupportedOracle(String),

    #[error("point is off the manifold by {distance:.3e} (tolerance {tolerance:.1e})")]
    OffManifold { distance: f64, tolerance: f64 },

    #[error("diffusion time must be positive, got {0}")]
    InvalidTime(f64),

    #[error("kernel bandwidth must be positive, got {0}")]
    InvalidBandwidth(f64),

    #[error("regularization parameter must be positive, got {0}")]
    InvalidRegularization(f64),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("index {index} out of range for dimension {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("matrix is not symmetric: max |A - A^T| = {0:.3e}")]
    AsymmetricInput(f64),

    #[error("eigensolver did not converge within budget; worst residuals: {residuals:?}")]
    Convergence { residuals: Vec<f64> },

    #[error("multiplicity groups sum to {groups} but {vectors} vectors were given")]
    MultiplicityMismatch { groups: usize, vectors: usize },

    #[error("eigenvalue {index} is not positive ({value:.3e}); cannot divide")]
    DegenerateEigenvalue { index: usize, value: f64 },

    #[error("dense kernel storage supports at most {max} points, got {got}")]
    Capacity { got: usize, max: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset metadata mismatch: {0}")]
    Metadata(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach the pipeline stage that produced this error.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad input/configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Parse { .. }
                | Error::Metadata(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::UnsupportedManifold(_)
                | Error::InvalidTime(_)
                | Error::InvalidBandwidth(_)
                | Error::InvalidRegularization(_)
                | Error::Capacity { .. }
        ) || matches!(self, Error::Stage { source, .. } if source.is_config())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
