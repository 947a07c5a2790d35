use thiserror::Error;

/// Errors raised by the geometry engine and the verification harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("requested jet order {requested} exceeds the supported maximum {max}")]
    OrderTooHigh { requested: usize, max: usize },

    #[error("jet space with {0} variables is not supported (max 16)")]
    TooManyVariables(usize),

    #[error("division by a jet with zero value")]
    DivisionByZero,

    #[error("square root of non-positive value {0}")]
    SqrtNonPositive(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("slit condition violated: |{block}| = {norm:e} < {min:e}")]
    SlitViolation { block: &'static str, norm: f64, min: f64 },

    #[error("matrix is not positive definite (leading minor {minor} = {value:e})")]
    NotPositiveDefinite { minor: usize, value: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate flag (Gram determinant {0:e})")]
    DegenerateFlag(f64),

    #[error("spec error at `{path}`: {message}")]
    Spec { path: String, message: String },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
