//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the fusion pipeline.
#[derive(Debug, Error)]
pub enum DfpError {
    /// A parameter or input value is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two inputs that must agree in shape do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An input is syntactically valid but carries no usable signal
    /// (for example a constant plane where contrast is required).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The optimization produced a non-finite loss and cannot continue.
    #[error("numeric divergence at iteration {iteration}: {detail}")]
    NumericDivergence { iteration: usize, detail: String },

    /// Underlying file-system failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Image decoding or encoding failure.
    #[error("image codec error: {0}")]
    Codec(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, DfpError>;

impl DfpError {
    /// Convenience constructor for [`DfpError::InvalidArgument`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        DfpError::InvalidArgument(msg.into())
    }

    /// Convenience constructor for [`DfpError::ShapeMismatch`].
    pub fn shape(msg: impl Into<String>) -> Self {
        DfpError::ShapeMismatch(msg.into())
    }
}
