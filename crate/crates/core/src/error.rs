use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("lower index {lower} exceeds upper index {upper}")]
    IndexOrder { lower: u64, upper: u64 },

    #[error("multi-index lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("incompatible operands: {0}")]
    ContextMismatch(String),

    #[error("unsupported group for this operation: {0}")]
    UnsupportedGroup(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("target level {target} is below source level {source_level}")]
    LevelDecrease { source_level: String, target: String },

    #[error("the zero element has no symbol")]
    ZeroElement,

    #[error("chart {0} does not carry a group identity point")]
    NoIdentityPoint(String),

    #[error("point {0} is not invertible in Z_p")]
    NonUnitPoint(String),

    #[error("order {n} exceeds the configured bound {bound}")]
    OrderBoundExceeded { n: u32, bound: u32 },

    #[error("series is stored in the level-{0} basis; convert to the [k] basis first")]
    MissingBasisConversion(u32),

    #[error("radius must satisfy 0 < r < 1 (valuation slope must be positive), got slope {0}")]
    InvalidRadius(String),

    #[error("invalid Chevalley datum: {0}")]
    InvalidDatum(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("malformed input: {0}")]
    Malformed(String),
}
