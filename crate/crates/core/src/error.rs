use thiserror::Error;

/// Library-wide error type. Data errors carry enough context (line, row,
/// column, label) to be reported to a user without a backtrace.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge list line {line}: expected 2 tab-separated fields, found {found}")]
    MalformedEdgeRecord { line: usize, found: usize },

    #[error("edge list line {line}: empty {side} label")]
    EmptyLabel { line: usize, side: &'static str },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("basket mass {actual} does not match edge count {expected}")]
    MassMismatch { expected: usize, actual: usize },

    #[error("tree has no nodes")]
    EmptyTree,

    #[error("no baskets")]
    NoBaskets,

    #[error("exhaustive enumeration refused: {sources}x{targets} exceeds the 14x14 guard")]
    TooLargeForExhaustive { sources: usize, targets: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("kdata row {row}: missing value in column {column}")]
    MissingValue { row: usize, column: String },

    #[error("kdata column {0} has no declared mode")]
    UndeclaredMode(String),

    #[error("mode declared for unknown column {0}")]
    UnknownColumn(String),

    #[error("kdata needs an id column and at least one attribute column")]
    NoAttributes,

    #[error("line {line}: {what}")]
    Malformed { line: usize, what: String },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("evaluation needs both a positive and a negative example")]
    SingleClass,

    #[error("evaluation needs at least one positive example")]
    NoPositives,

    #[error("ranking is missing an entry for labeled node {0}")]
    UnrankedNode(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
