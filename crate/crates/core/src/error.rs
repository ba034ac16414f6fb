use thiserror::Error;

/// Errors shared by the library's constructors, parsers and validators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("empty tile at line {line}, column {column}")]
    EmptyTile { line: usize, column: usize },

    #[error("duplicate tile {tile} (tile #{index})")]
    DuplicateTile { index: usize, tile: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
