use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors for instance validation, function evaluation and inequality checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{context}: entry {index} must be strictly positive, got {value}")]
    NonPositive {
        context: &'static str,
        index: usize,
        value: String,
    },

    #[error("length mismatch ({context}): {left} vs {right}")]
    LengthMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("point {index} = {value} lies outside [0, {upper}]")]
    PointOutOfDomain {
        index: usize,
        value: String,
        upper: String,
    },

    #[error("domain upper bound must be strictly positive, got {0}")]
    NonPositiveDomain(String),

    #[error("barycenter {value} lies outside [0, {upper}]")]
    BarycenterOutOfDomain { value: String, upper: String },

    #[error("enumeration needs {required} multi-indices, cap is {cap}")]
    CapExceeded { required: u128, cap: u64 },

    #[error("instance carries no r-family weights")]
    MissingRFamily,

    #[error("function model has no certificate and no override was given")]
    MissingCertificate,

    #[error("{family} cannot be evaluated exactly in rational mode")]
    ExactUnsupported { family: &'static str },

    #[error("function evaluated at negative input {0}")]
    NegativeFunctionInput(String),

    #[error("power exponent must be >= 3, got {0}")]
    ExponentTooSmall(String),

    #[error("combination scale must be strictly positive, got {0}")]
    NonPositiveScale(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{path}: weights sum to {sum}, expected 1")]
    WeightSum { path: String, sum: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code convention: 2 for invalid input, 3 for a blown
    /// enumeration cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
