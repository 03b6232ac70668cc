use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex count {n} outside supported range 1..={max}")]
    VertexCount { n: usize, max: usize },
    #[error("vertex {vertex} out of range for a tournament on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex subset must be non-empty")]
    EmptySubset,
    #[error("duplicate vertex {0} in subset")]
    DuplicateVertex(usize),
    #[error("copy size k={k} invalid for n={n} (need 3 <= k <= n)")]
    CopySize { k: usize, n: usize },
    #[error("{what}: limit {limit}, got {got}")]
    TooLarge { what: &'static str, limit: usize, got: usize },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible linear program: {0}")]
    Infeasible(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
