use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("field mismatch: Q(sqrt({left})) vs Q(sqrt({right}))")]
    FieldMismatch { left: i64, right: i64 },

    #[error("invalid quadratic field: {0}")]
    InvalidField(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("index {index} outside window [{lo}, {hi})")]
    IndexOutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("length of letter '{0}' is not positive")]
    NonPositiveLength(char),

    #[error("duplicate rule for letter '{0}'")]
    DuplicateRule(char),

    #[error("letter '{0}' is not in the alphabet")]
    UnknownLetter(char),

    #[error("image of '{0}' is empty")]
    ErasingImage(char),

    #[error("not a substitution: {0}")]
    NotSubstitution(String),

    #[error("seed {left}|{right} is not admissible: {reason}")]
    InadmissibleSeed {
        left: String,
        right: char,
        reason: String,
    },

    #[error("incidence matrix is not primitive")]
    NotPrimitive,

    #[error("no eigenvalue of modulus smaller than 1")]
    NoStableEigenvalue,

    #[error("numerical residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("invalid cut-and-project parameters: {0}")]
    InvalidCap(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("set is not bounded distance to a lattice: {0}")]
    NotBdl(String),

    #[error("points do not cover the requested horizon: {0}")]
    InsufficientCoverage(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{0} distinct gaps found, at most 3 are possible")]
    TooManyGaps(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
