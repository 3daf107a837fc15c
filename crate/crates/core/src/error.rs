use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown block `{0}`")]
    UnknownBlock(String),
    #[error("diagonal entry <{0}> is odd, the lattice would not be even")]
    OddDiagonal(i64),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("diagonal entry {0} of the gram matrix is odd")]
    NotEven(usize),
    #[error("lattice is degenerate")]
    Degenerate,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("the given vectors span the zero subspace")]
    EmptySpan,
    #[error("block {0} has no dual vector `{1}`")]
    NoDualVector(usize, String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("computation budget exhausted: {0}")]
    Budget(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("script error on line {line}: {msg}")]
    Script { line: usize, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
