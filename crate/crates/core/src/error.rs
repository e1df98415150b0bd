use std::fmt;

use thiserror::Error;

/// A parse failure, tagged with the line and column (both 1-based) where it
/// was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("set is finite where an infinite set is required: {0}")]
    FiniteSet(String),
    #[error("function is not strictly increasing: {0}")]
    NotIncreasing(String),
    #[error("function is not nondecreasing: {0}")]
    NotMonotone(String),
    #[error("intersection of generators {indices:?} is finite")]
    FiniteIntersection { indices: Vec<usize> },
    #[error("invalid witness: {0}")]
    WitnessInvalid(String),
    #[error("guesser offers fewer than two unused elements at round {round}")]
    ExhaustedChoice { round: u64 },
    #[error("generator exceeded its budget of {budget} steps before covering [0, {depth})")]
    BudgetExceeded { depth: u64, budget: u64 },
    #[error("point {0:?} has an empty trace")]
    EmptyTrace(String),
    #[error("cover has no infinite set of covering windows under {0}")]
    Unglueable(String),
    #[error("schedule does not match selection mode: {0}")]
    ShapeMismatch(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
