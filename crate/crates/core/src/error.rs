use thiserror::Error;

/// Errors raised by the agreement toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sequence length must be at least 1")]
    EmptySequence,

    #[error("segment lengths must be positive (segment {index} has length 0)")]
    ZeroLengthSegment { index: usize },

    #[error("profile is infeasible: total annotated length {total} exceeds sequence length {n}")]
    Infeasible { total: usize, n: usize },

    #[error("segment of length {length} does not fit in a sequence of {n} tokens")]
    SegmentTooLong { length: usize, n: usize },

    #[error("profile has no segments")]
    EmptyProfile,

    #[error("segment index {index} out of range 1..={k}")]
    SegmentIndex { index: usize, k: usize },

    #[error("start index {start} outside support 1..={max}")]
    StartOutOfSupport { start: usize, max: usize },

    #[error("span ({start}, {length}) lies outside a sequence of {n} tokens")]
    SpanOutOfBounds { start: usize, length: usize, n: usize },

    #[error("spans ({start1}, {length1}) and ({start2}, {length2}) overlap")]
    OverlappingSpans {
        start1: usize,
        length1: usize,
        start2: usize,
        length2: usize,
    },

    #[error("sequence lengths differ: {left} vs {right}")]
    SequenceMismatch { left: usize, right: usize },

    #[error("threshold alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("chance agreement is 1: every random annotation agrees, corrected score undefined")]
    DegenerateChance,

    #[error("at least one profile is required")]
    NoProfiles,

    #[error("enumeration of {required} configurations exceeds budget {budget}")]
    BudgetExceeded { required: String, budget: u64 },

    #[error("at least {min} samples are required, got {got}")]
    TooFewSamples { min: u64, got: u64 },

    #[error(transparent)]
    Conll(#[from] crate::corpus::ConllError),

    #[error("sentence {index} misaligned: {reason}")]
    Misaligned { index: usize, reason: String },

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
