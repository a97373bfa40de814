//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by grid construction, operators, integrators and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A vector or grid has the wrong shape for the requested operation.
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    /// An index fell outside the grid (including its one-cell ghost band).
    #[error("index ({i}, {j}) outside grid of {rows}x{cols} (ghost band included)")]
    IndexOutOfBounds {
        i: isize,
        j: isize,
        rows: usize,
        cols: usize,
    },

    /// A non-finite value appeared while applying the spatial operator.
    #[error("non-finite value in {op} at pixel ({i}, {j})")]
    NonFinite {
        op: &'static str,
        i: usize,
        j: usize,
    },

    /// The time integration blew up.
    #[error("flow diverged at iteration {iteration}: max |u| = {max_abs:.3e}")]
    Diverged { iteration: usize, max_abs: f64 },

    /// Dense spectral verification was asked for a grid above its budget.
    #[error("spectral verification limited to {limit} unknowns, got {got}; use a smaller image")]
    SpectralBudget { limit: usize, got: usize },

    /// Malformed or unsupported image file.
    #[error("image format error: {0}")]
    ImageFormat(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
