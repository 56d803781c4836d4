use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the alignment library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {what} must be at least {min}, got {got}")]
    InvalidSize {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value {value} at index {index} lies outside [0, 1]")]
    Domain { index: usize, value: f64 },

    #[error("incompatible signals: {left_len}x{left_dim} vs {right_len}x{right_dim}")]
    IncompatibleSignals {
        left_len: usize,
        left_dim: usize,
        right_len: usize,
        right_dim: usize,
    },

    #[error("degenerate map: {0}")]
    Degenerate(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("parse error in {path} at row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
