use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity must be at least 1: {0}")]
    EmptyArity(String),
    #[error("cannot collapse: {0}")]
    CannotCollapse(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("permutation not compatible with tree: {0}")]
    Incompatible(String),
    #[error("not a cactus: {0}")]
    NotACactus(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("invalid cell complex: {0}")]
    InvalidComplex(String),
    #[error("singular matrix")]
    Singular,
    #[error("degenerate curve derivative at t = {0}")]
    DegenerateDerivative(f64),
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), msg: msg.into() }
    }
}
