use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: message index {index} is outside [1..{n}]")]
    IndexOutOfRange { line: usize, index: usize, n: usize },
    #[error("line {line}: message index {index} appears twice in one field")]
    DuplicateIndex { line: usize, index: usize },
    #[error("invalid instance: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("malformed JSON instance: {0}")]
    Json(String),
    #[error("{0}")]
    Usage(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("code dimensions do not match the instance: {0}")]
    DimensionMismatch(String),
    #[error("enumeration guard exceeded: n·t = {nt} (max 12), M = {m} (max 16)")]
    GuardExceeded { nt: usize, m: usize },
    #[error("LP solver stopped after {0} iterations without an exact optimum")]
    IterationCap(usize),
    #[error("LP solver failure: {0}")]
    Solver(String),
    #[error("bounds out of order: {0}")]
    Consistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
