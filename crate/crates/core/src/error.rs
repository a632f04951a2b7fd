use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph6 parse error at byte {offset}: {reason}")]
    Graph6 { offset: usize, reason: String },

    #[error("graph6 short form supports at most 62 vertices, got {0}")]
    UnsupportedSize(usize),

    #[error("adjacency text invalid at row {row}, column {col}: {reason}")]
    Adjacency { row: usize, col: usize, reason: String },

    #[error("Q text invalid at line {line}: {reason}")]
    QText { line: usize, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("matrix is singular")]
    Singular,

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("graphs are not generalized cospectral: {0}")]
    NotCospectral(String),

    #[error("not a rational orthogonal matrix with unit row sums: {0}")]
    InvalidOrthogonal(String),

    #[error("exhaustive enumeration is limited to n <= 7 (got n = {0}); ingest a graph6 stream instead")]
    EnumerationSize(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
