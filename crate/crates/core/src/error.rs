use thiserror::Error;

/// Errors raised by the library. Each variant maps to a stable CLI exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("lambda = {value} is outside the admissible range {range}")]
    Lambda { value: f64, range: &'static str },

    #[error("points {a} and {b} are not adjacent")]
    NotAdjacent { a: String, b: String },

    #[error("budget exceeded for d = {d}, n = {n}: {what} needs {needed}, limit is {limit}")]
    Budget {
        what: &'static str,
        d: usize,
        n: usize,
        needed: u128,
        limit: u128,
    },

    #[error("local box has no parity-admissible point (n = {n}, sigma = {sigma})")]
    EmptyRegion { n: usize, sigma: f64 },

    #[error("sample has no wired root to remove")]
    NoWiredRoot,

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
