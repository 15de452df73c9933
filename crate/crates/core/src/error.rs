use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("malformed tableau: {0}")]
    MalformedTableau(String),

    #[error("n = {n} exceeds the exact-arithmetic cap {cap}; use log_dim instead")]
    ExactCapExceeded { n: usize, cap: usize },

    #[error("n = {n} exceeds the enumeration cap {cap}; use Monte Carlo calibration")]
    EnumerationCapExceeded { n: usize, cap: usize },

    #[error("NaN cannot be inserted into a tableau")]
    NanValue,

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("tied values in {which} sample at positions {first} and {second}")]
    Ties {
        which: &'static str,
        first: usize,
        second: usize,
    },

    #[error("samples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
