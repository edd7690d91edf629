//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scale needs at least two labels, got {0}")]
    ScaleTooSmall(usize),

    #[error("duplicate scale label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown label `{label}` for scale [{scale}]")]
    UnknownLabel { label: String, scale: String },

    #[error("vector of {len} values does not match scale arity {arity}")]
    ArityMismatch { len: usize, arity: usize },

    #[error("value {0} outside [0, 1]")]
    OutOfUnitRange(f64),

    #[error("values sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("cannot normalize values summing to {0}")]
    ZeroMass(f64),

    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("negative value {0}")]
    Negative(f64),

    #[error("sigma must be a positive finite number, got {0}")]
    InvalidSigma(f64),

    #[error("indicator `{name}`: {reason}")]
    InvalidIndicator { name: String, reason: String },

    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),

    #[error("level tuple {tuple:?}: {reason}")]
    BadTuple { tuple: Vec<usize>, reason: String },

    #[error("conditional probability table has {got} rows, expected {expected}")]
    IncompleteTable { got: usize, expected: usize },

    #[error(
        "posterior has zero total mass: evidence and prior assign no weight to any common grade"
    )]
    ZeroPosterior,

    #[error("network structure invalid: {0}")]
    BadNetwork(String),

    #[error("learning configuration invalid: {0}")]
    BadLearnConfig(String),

    #[error("training record invalid: {0}")]
    BadRecord(String),

    #[error("{path}:{line}: {reason}")]
    MalformedRow {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("dataset `{0}` has no records")]
    EmptyDataset(String),

    #[error("column `{0}` has no observed values to impute from")]
    UnimputableColumn(String),

    #[error("stratified split needs at least 2 records per class; class `{0}` has {1}")]
    TooFewPerClass(String, usize),

    #[error("predictions and truths differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("model bundle error: {0}")]
    Bundle(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
