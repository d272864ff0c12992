use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("coordinate systems differ: [{0}] vs [{1}]")]
    CoordinateMismatch(String, String),
    #[error("manifold has no connection")]
    MissingConnection,
    #[error("manifold has no metric")]
    MissingMetric,
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("form is not closed ({} nonzero component(s) of its differential)", .0.len())]
    NotClosed(Vec<String>),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("config: {0}")]
    Config(String),
}
