use thiserror::Error;

use crate::lu::FactorState;

/// Errors raised by the factorization, the compact schemes and matrix I/O.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("operation requires a factorization in state {expected:?}, found {found:?}")]
    WrongState { expected: FactorState, found: FactorState },

    #[error("loss of positive definiteness at pivot {index}: computed diagonal {value}")]
    NumericBreakdown { index: usize, value: String },

    #[error("zero diagonal entry at position {index} during substitution")]
    DivideByZero { index: usize },

    #[error("matrix has numerical rank zero")]
    RankZero,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("empty matrix: dimensions must be positive")]
    Empty,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dimension error: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command-line tool: 2 for malformed
    /// input or shapes, 3 for numeric breakdown, 4 for a factorization in the
    /// wrong state. Rank zero is a warning and maps to 0.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ShapeMismatch(_)
            | Error::NonFinite { .. }
            | Error::Empty
            | Error::Parse { .. }
            | Error::Dimension(_) => 2,
            Error::NumericBreakdown { .. } | Error::DivideByZero { .. } => 3,
            Error::WrongState { .. } => 4,
            Error::RankZero => 0,
        }
    }
}
