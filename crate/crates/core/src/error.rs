use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{d} does not divide {n}")]
    NotDivisor { d: u64, n: u64 },
    #[error("{0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("{l} is not a unit modulo {n}")]
    NotUnit { l: u64, n: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("level {0} is not in the support")]
    NotInSupport(u64),
    #[error("invalid support: {0}")]
    Support(String),
    #[error("supports differ")]
    SupportMismatch,
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("computation too large: {needed} matrix entries exceed the cap of {cap}")]
    TooLarge { needed: usize, cap: usize },
    #[error("{0}")]
    Bound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
