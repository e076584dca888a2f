use thiserror::Error;

/// Errors raised by parameter validation, the inversion-count codecs and
/// the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q must lie strictly between 0 and 1, got {0}")]
    InvalidQ(f64),

    #[error("tolerance `{name}` must be a positive finite number, got {value}")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("interval [{lo}..{hi}] is empty or reversed")]
    InvalidInterval { lo: i64, hi: i64 },

    #[error("window [{lo}..{hi}] needs {expected} values, got {got}")]
    LengthMismatch {
        lo: i64,
        hi: i64,
        expected: usize,
        got: usize,
    },

    #[error("value {0} occurs more than once in the window")]
    DuplicateValue(i64),

    #[error("inversion count {value} at index {index} exceeds its support limit {limit}")]
    RejectSupport {
        index: usize,
        value: u64,
        limit: u64,
    },

    #[error("left inversion count at position {0} is not certified")]
    NotCertified(i64),

    #[error("rebuilt value {value} is produced by positions {first} and {second}")]
    NotInjective { value: i64, first: i64, second: i64 },

    #[error("window [{lo}..{hi}] is not self-contained")]
    NotSelfContained { lo: i64, hi: i64 },

    #[error("interval [{a}..{b}] is not contained in window [{lo}..{hi}]")]
    OutsideWindow { a: i64, b: i64, lo: i64, hi: i64 },

    #[error("parts of a Young diagram must be positive and weakly decreasing: {0:?}")]
    InvalidDiagram(Vec<u64>),

    #[error("block sequences must be nonempty and of equal length ({0} vs {1})")]
    BlockShape(usize, usize),

    #[error("a displacement query needs at least one entry")]
    EmptyQuery,

    #[error("brute-force enumeration is limited to n <= 8, got {0}")]
    TooLarge(usize),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
