use thiserror::Error;

/// Errors raised by constructions whose preconditions fail.
///
/// Law and axiom violations on otherwise well-formed input are not errors;
/// they are reported through the various report types.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported quantale kind `{0}`")]
    UnsupportedKind(String),

    #[error("quantale kind `{0}` is out of scope")]
    OutOfScope(String),

    #[error("value `{value}` is not in the carrier of {quantale}")]
    NotInCarrier { value: String, quantale: String },

    #[error("cannot parse `{0}` as a quantale value: {1}")]
    BadValue(String, String),

    #[error("quantale mismatch: {0} vs {1}")]
    QuantaleMismatch(String, String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("duplicate object label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("presheaf constructions require a finite quantale")]
    InfiniteQuantale,

    #[error("{what} exceeds the object limit of {limit} ({count} candidate tables)")]
    TooManyObjects {
        what: String,
        count: u128,
        limit: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not a V-functor: {0}")]
    NotAFunctor(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
