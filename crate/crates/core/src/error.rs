use thiserror::Error;

/// Errors raised by the algebra engine. Every variant is a precondition
/// violation on the caller's data; none of them indicate an internal fault.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable lists differ: [{left}] vs [{right}]")]
    VarMismatch { left: String, right: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("negative exponent on non-invertible variable `{0}`")]
    NegativeExponent(String),

    #[error("translation is undefined on invertible variable `{0}`")]
    TranslationOnInvertible(String),

    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("algebra tags differ: {0} vs {1}")]
    TagMismatch(String, String),

    #[error("negative generator power in {0}")]
    PlusClosure(String),

    #[error("not a Rees element: coefficient of {generators} has hbar-valuation {valuation} < {required}")]
    NotRees {
        generators: String,
        valuation: usize,
        required: usize,
    },

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("outside degree bound {bound}: {what}")]
    DegreeBound { bound: i32, what: String },

    #[error("inversion failure: {0}")]
    OutOfSpan(String),

    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
