use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyInput,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid symbol {0:?}: symbols must be nonempty and contain no whitespace")]
    InvalidSymbol(String),

    #[error("duplicate point {0}")]
    DuplicatePoint(String),

    #[error("matrix is singular (rank {rank})")]
    Singular { rank: usize },

    #[error("point set is not good")]
    NotGood,

    #[error("operation requires a separated point set (use coordinate tagging)")]
    UnsupportedInput,

    #[error("{0:?} is not a column of the point set")]
    UnknownBoundaryElement(String),

    #[error("the given set is not a boundary")]
    NotABoundary,

    #[error("the two points are not related")]
    NotRelated,

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
