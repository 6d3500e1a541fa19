use thiserror::Error;

use crate::expr::CellRef;

/// Errors raised while loading inputs or evaluating queries and expressions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("table `{table}` has a ragged row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        table: String,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("unknown table `{0}`")]
    UnknownTable(String),

    #[error("cell reference {0} is out of range")]
    BadRef(CellRef),

    #[error("column {col} is out of range for a table with {arity} columns")]
    BadColumn { col: usize, arity: usize },

    #[error("group members evaluate to different values")]
    GroupMismatch,

    #[error("function `{func}` expects {expected} arguments, got {found}")]
    Arity {
        func: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("function `{func}` cannot be applied to {what}")]
    TypeMismatch { func: &'static str, what: String },

    #[error("query is not concrete")]
    NotConcrete,

    #[error("unknown hole id {0}")]
    UnknownHole(usize),

    #[error("binding does not fit the hole kind {0}")]
    KindMismatch(String),

    #[error("intermediate result exceeds {0} rows")]
    TooLarge(usize),

    #[error("no input tables")]
    NoInputs,

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
