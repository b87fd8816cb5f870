use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index ({row}, {col}) out of range for a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed CSR structure: {0}")]
    MalformedCsr(String),

    #[error("matrix is not square ({n_rows}x{n_cols})")]
    NotSquare { n_rows: usize, n_cols: usize },

    #[error("entry ({row}, {col}) lies outside the {expected} triangle")]
    NotTriangular {
        row: usize,
        col: usize,
        expected: &'static str,
    },

    #[error("row {row} has a missing or zero diagonal")]
    MissingDiagonal { row: usize },

    #[error("level values are not a contiguous range starting at 1 (missing level {missing})")]
    LevelGap { missing: usize },

    #[error("zero pivot at row {row}")]
    ZeroPivot { row: usize },

    #[error("block {block}: zero pivot at local row {local_row}")]
    BlockZeroPivot { block: usize, local_row: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("serial and parallel runs disagree: {0}")]
    Nondeterministic(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
