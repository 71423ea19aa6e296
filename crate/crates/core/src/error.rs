use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series must have at least one coefficient")]
    EmptySeries,

    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },

    #[error("{op}: constant term must be {expected}, got {got}")]
    ConstantTerm {
        op: &'static str,
        expected: &'static str,
        got: String,
    },

    #[error("series is not normalized: need f(0) = 0 and f'(0) = 1")]
    NotNormalized,

    #[error("{op}: insufficient truncation order, need at least {needed}, got {got}")]
    InsufficientOrder {
        op: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point ({x}, {y}) lies outside the domain of {objective}")]
    OutsideDomain {
        objective: &'static str,
        x: f64,
        y: f64,
    },

    #[error("test vector support {index} exceeds table range {p_max}")]
    SupportOutsideTable { index: usize, p_max: usize },

    #[error("{0}")]
    Config(String),
}
