use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MpvError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("level must be at least 1")]
    InvalidLevel,
    #[error("divergent symbol {0} has no value")]
    Divergent(String),
    #[error("word {0} ends in e0 and has no series form")]
    NoSeriesForm(String),
    #[error("{d} does not divide the level {n}")]
    NotDivisor { d: u32, n: u32 },
    #[error("{0} is not a prime >= 5")]
    InvalidPrime(u64),
    #[error("requested free columns do not complement a pivot basis: {0}")]
    BadFreeSet(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, MpvError>;
