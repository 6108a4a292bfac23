use thiserror::Error;

/// Errors raised anywhere in the symbolic engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} out of range for a chart of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` expects {expected} indices, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("invalid declaration: {0}")]
    Declaration(String),
    #[error("contraction over mismatched variance: {0}")]
    Variance(String),
    #[error("form degree {0} exceeds the supported maximum of 3")]
    DegreeOverflow(usize),
    #[error("expected a form of degree {expected}, got degree {got}")]
    Degree { expected: usize, got: usize },
    #[error("no unit pivot available: {0}")]
    NonUnitPivot(String),
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("underdetermined linear system, free unknowns: {0}")]
    Ambiguous(String),
    #[error("non-linear occurrence of an unknown: {0}")]
    NonLinear(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
