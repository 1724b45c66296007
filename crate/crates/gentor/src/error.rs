use thiserror::Error;

/// Crate-wide error type. Each variant carries the stable machine code
/// emitted by the CLI (`code()`), so library callers and golden tests can
/// match on codes rather than display strings.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cyclic factor order must be at least 2, got {0}")]
    BadOrder(i64),
    #[error("too many factors: {0} (at most 26)")]
    TooManyFactors(usize),
    #[error("unknown generator '{0}'")]
    UnknownGenerator(char),
    #[error("words belong to different groups")]
    GroupMismatch,
    #[error("operation requires a nontrivial element")]
    TrivialInput,
    #[error("certificate is not verified")]
    NotVerified,
    #[error("element is not conjugate into any factor")]
    NotConjugateIntoFactor,
    #[error("verified certificate contradicts the factor theorem: {0}")]
    TheoremViolation(String),
    #[error("configured defect bound is violated: {0}")]
    DefectViolation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("presentation has no peripheral pair")]
    NoPeripheral,
    #[error("bad filling slope: ({0}, {1})")]
    BadSlope(i64, i64),
    #[error("presentation does not have H1 = Z")]
    NotKnotLike,
    #[error("bad word: {0}")]
    BadWord(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "E_PARSE",
            Error::BadOrder(_) => "E_BAD_ORDER",
            Error::TooManyFactors(_) => "E_TOO_MANY_FACTORS",
            Error::UnknownGenerator(_) => "E_UNKNOWN_GENERATOR",
            Error::GroupMismatch => "E_GROUP_MISMATCH",
            Error::TrivialInput => "E_TRIVIAL_INPUT",
            Error::NotVerified => "E_NOT_VERIFIED",
            Error::NotConjugateIntoFactor => "E_NOT_CONJUGATE_INTO_FACTOR",
            Error::TheoremViolation(_) => "E_THEOREM_VIOLATION",
            Error::DefectViolation(_) => "E_DEFECT_VIOLATION",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::BadParam(_) => "E_BAD_PARAM",
            Error::NoPeripheral => "E_NO_PERIPHERAL",
            Error::BadSlope(_, _) => "E_BAD_SLOPE",
            Error::NotKnotLike => "E_NOT_KNOT_LIKE",
            Error::BadWord(_) => "E_BAD_WORD",
            Error::Internal(_) => "E_INTERNAL",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
