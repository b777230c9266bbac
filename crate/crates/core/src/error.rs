use thiserror::Error;

use crate::automaton::ValidationReport;

#[derive(Debug, Error)]
pub enum LqcaError {
    #[error("amplitude ({re}, {im}) is not finite")]
    NonFiniteAmplitude { re: f64, im: f64 },

    #[error("tolerance `{name}` must lie strictly between 0 and 1, got {value}")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("alphabet is empty")]
    EmptyAlphabet,

    #[error("state `{0}` is listed more than once")]
    DuplicateState(String),

    #[error("invalid state symbol `{0:?}`")]
    InvalidSymbol(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("word `{word}` has length {found}, expected {expected}")]
    WrongWordLength {
        word: String,
        expected: usize,
        found: usize,
    },

    #[error("neighborhood must be a nonempty strictly increasing list, got {0:?}")]
    InvalidNeighborhood(Vec<i64>),

    #[error("neighborhood {0:?} is not an interval; expand it first")]
    NotSimple(Vec<i64>),

    #[error("operation requires a neighborhood of size at least 2, got {0}")]
    NeighborhoodTooSmall(usize),

    #[error("oracle window of {width} cells exceeds the limit of {limit}")]
    OracleScaleExceeded { width: usize, limit: usize },

    #[error("vector is already in the span of the basis")]
    AlreadyInSpan,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("border vectors have infinite components")]
    InfiniteBorder,

    #[error("invalid automaton: {0}")]
    Invalid(ValidationReport),

    #[error("{path}: {message}")]
    Document { path: String, message: String },

    #[error("invalid configuration `{0}`; expected comma separated `index:state` pairs")]
    ConfigurationSyntax(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = LqcaError> = std::result::Result<T, E>;
