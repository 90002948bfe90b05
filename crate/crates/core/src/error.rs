use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid test space: {0}")]
    InvalidTestSpace(String),
    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),
    #[error("missing value for outcome `{0}`")]
    MissingValue(String),
    #[error("map is not a bijection: {0}")]
    NotBijection(String),
    #[error("states do not separate outcomes `{0}` and `{1}`")]
    NotSeparating(String, String),
    #[error("permutation is not a symmetry of the test space: {0}")]
    NotSymmetry(String),
    #[error("group closure exceeds the limit of {limit} elements")]
    GroupTooLarge { limit: usize },
    #[error("unsupported for this model kind: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("marginal probability of `{0}` is zero; conditional state undefined")]
    ZeroMarginal(String),
    #[error("conditional state given `{0}` lies outside the designated state space")]
    ConditionalOutsideStateSpace(String),
    #[error("no orthogonalizing form: canonical form has c = {c} but m = {m}")]
    NoOrthogonalizingForm { c: String, m: String },
    #[error("morphism condition {condition} fails: {detail}")]
    MorphismInvalid { condition: String, detail: String },
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
