use thiserror::Error;

/// Errors produced by the enumeration and factorization engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input that does not match the algebra / partial-hom schema.
    #[error("malformed input at {path}: {message}")]
    Malformed { path: String, message: String },

    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),

    #[error("arity mismatch for `{symbol}`: expected {expected}, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    /// An enumeration would exceed the configured resource limit.
    #[error("limit exceeded: {what} requires {required}, limit is {limit}")]
    LimitExceeded {
        what: String,
        required: String,
        limit: usize,
    },

    /// The algebra has no affine witness among its ternary term functions.
    #[error("not affine: {0}")]
    NotAffine(String),

    /// Caller-side precondition violated (bad arguments, not a subuniverse, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A verified identity failed. On affine input this is an implementation bug.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub fn malformed(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn limit(what: impl Into<String>, required: impl ToString, limit: usize) -> Self {
        Error::LimitExceeded {
            what: what.into(),
            required: required.to_string(),
            limit,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
