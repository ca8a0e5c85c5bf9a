use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("raster index ({g}, {h}) outside 1..={rows} x 1..={cols}")]
    RasterOutOfRange {
        g: usize,
        h: usize,
        rows: usize,
        cols: usize,
    },

    #[error("row {0} has zero norm")]
    ZeroNormRow(usize),

    #[error("invalid row: {0}")]
    InvalidRow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
