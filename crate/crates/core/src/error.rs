use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("all coordinates are zero")]
    AllZero,
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point {0} lies in the base locus of the morphism")]
    BaseLocus(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("index {index} out of range (first index is {first})")]
    IndexOutOfRange { index: u64, first: u64 },
    #[error("elliptic divisibility recurrence left the integers at index {0}")]
    NonIntegral(u64),
    #[error("point lies on the divisor")]
    OnDivisor,
    #[error("degree {0} is too small for this threshold")]
    DegreeTooSmall(u64),
    #[error("form of degree {0} is not linear")]
    NotLinear(u32),
    #[error("term {0} is zero")]
    ZeroTerm(u64),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache error: {0}")]
    Cache(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroInput => "ZeroInput",
            Error::NotPrime(_) => "NotPrime",
            Error::AllZero => "AllZero",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BaseLocus(_) => "BaseLocus",
            Error::ResourceLimit(_) => "ResourceLimit",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NonIntegral(_) => "NonIntegral",
            Error::OnDivisor => "OnDivisor",
            Error::DegreeTooSmall(_) => "DegreeTooSmall",
            Error::NotLinear(_) => "NotLinear",
            Error::ZeroTerm(_) => "ZeroTerm",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::Parse(_) => "Parse",
            Error::Cache(_) => "Cache",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
