use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("symbol {symbol} at position {position} is outside an alphabet of size {size}")]
    SymbolOutOfRange {
        symbol: u64,
        position: usize,
        size: u64,
    },

    #[error("invalid alphabet size {0}")]
    InvalidAlphabet(u64),

    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("alphabet too small: need at least {required} symbols, have {actual}")]
    AlphabetTooSmall { required: u64, actual: u64 },

    #[error("resample budget of {budget} iterations exhausted; last bad window [{start}, {end}]")]
    ResampleBudget { budget: u64, start: usize, end: usize },

    #[error("embedding preconditions violated: {0}")]
    Preconditions(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
