use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} axes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid interval [{lo},{hi}] on axis {axis} (extent {extent})")]
    InvalidInterval { axis: usize, lo: u32, hi: u32, extent: u32 },

    #[error("invalid grid bounds: {0}")]
    InvalidBounds(String),

    #[error("attribute index {index} out of range ({count} attributes)")]
    AttributeOutOfRange { index: usize, count: usize },

    #[error("class index {index} out of range ({count} classes)")]
    ClassOutOfRange { index: usize, count: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("size mismatch at byte offset {offset}: expected {expected} bytes, found {found}")]
    SizeMismatch {
        offset: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value at byte offset {offset}")]
    NonFinite { offset: usize },

    #[error("unknown format: {0}")]
    UnknownFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
