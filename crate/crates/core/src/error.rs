use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid Cartan type: {0}")]
    InvalidType(String),
    #[error("root system is reducible: {0}")]
    Reducible(String),
    #[error("not a root: {0:?}")]
    NotARoot(Vec<i64>),
    #[error("word is not reduced: {0:?}")]
    NotReduced(Vec<usize>),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("resource guard exceeded: {0}")]
    Guard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
