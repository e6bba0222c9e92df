use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the encoding, decoding and evaluation routines.
#[derive(Debug, Error)]
pub enum ShapeError {
    #[error("mask has no foreground pixels")]
    EmptyShape,

    #[error("center ({x}, {y}) does not lie on a foreground pixel")]
    CenterOutside { x: f64, y: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("{requested} coefficients requested but only {samples} samples available")]
    TooManyCoefficients { requested: usize, samples: usize },

    #[error("least-squares system is singular")]
    SingularFit,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("failed to parse {context}: {message}")]
    Parse { context: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = ShapeError> = std::result::Result<T, E>;

impl ShapeError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ShapeError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ShapeError::InvalidParameter(msg.into())
    }
}
