use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rank {rank} out of range for C({n},{k}) = {count}")]
    RankOutOfRange { n: usize, k: usize, rank: u128, count: u128 },

    #[error("combination {0:?} is not strictly increasing or exceeds its universe")]
    InvalidCombination(Vec<usize>),

    #[error("mode count {n} exceeds the limit of {limit} for this operation")]
    SizeLimit { n: usize, limit: usize },

    #[error("degree out of range: k = {k} with n = {n}")]
    DegreeOutOfRange { n: usize, k: usize },

    #[error("mode count mismatch: expected {expected}, found {found}")]
    ModeMismatch { expected: usize, found: usize },

    #[error("observable is not Hermitian: coefficient of {index} has imaginary part {imag:e}")]
    NonHermitian { index: String, imag: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing estimate for Majorana index {0}")]
    MissingEstimate(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("eigenvalue estimate too noisy: relative standard error {0:.4} exceeds 1%")]
    NoisyEigenvalue(f64),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
