use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("lattice is not a sublattice of the reference lattice")]
    NotSublattice,

    #[error("reference lattice does not contain the difference lattice of the point set")]
    NotContained,

    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse { path: String, line: usize, column: usize, message: String },

    #[error("malformed series: {0}")]
    MalformedSpec(String),

    #[error("slice S_{0} is empty")]
    EmptySlice(u64),

    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("degree {0} is not a member of the support semigroup within the window")]
    NotInSupport(u64),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("oracle: {0}")]
    Oracle(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),
}
