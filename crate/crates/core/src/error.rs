use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("operation requires a nonempty input: {0}")]
    Empty(&'static str),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(i128),

    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("[{value}] has no multiplicative inverse modulo {modulus}")]
    NoInverse { value: u64, modulus: u64 },

    #[error("{what} of size {size} exceeds the configured cap {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("cannot mix squared and unsquared distance matrices")]
    MixedSquared,

    #[error("correspondence is not total: {0}")]
    NotTotal(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid rational `{0}`")]
    ParseRational(String),

    #[error("no modulus in the sequence exceeds {0}")]
    NoAdmissibleModulus(u128),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn cap(what: &'static str, size: impl Into<u128>, cap: impl Into<u128>) -> Self {
        Error::CapExceeded { what, size: size.into(), cap: cap.into() }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
