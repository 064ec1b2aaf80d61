use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix not symmetric: {0}")]
    NotSymmetric(String),
    #[error("zero polynomial: {0}")]
    ZeroPolynomial(String),
    #[error("relaxation order too small: {0}")]
    OrderTooSmall(String),
    #[error("index escape: {0}")]
    IndexEscape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
