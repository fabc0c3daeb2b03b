use thiserror::Error;

/// Errors raised by the numerical and exact kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sequence is empty")]
    EmptySequence,

    #[error("sequence too short: need at least {needed} terms, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("index out of range: j + k = {requested} exceeds N = {max}")]
    IndexOutOfRange { requested: usize, max: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sequence must be normalized with c_0 = 1 (got {got})")]
    NotNormalized { got: String },

    #[error("tail bound {bound:e} exceeds tolerance {tol:e} already at k = 0")]
    TailBoundUnachievable { bound: f64, tol: f64 },

    #[error("point {re} + {im}i lies on the branch cut [{cut}, inf)")]
    OnBranchCut { re: f64, im: f64, cut: f64 },

    #[error("continuation failed near z = {re} + {im}i: {reason}")]
    ContinuationFailure { re: f64, im: f64, reason: String },

    #[error("denominator p - (p-1)B_p(z) = {magnitude:e} too small (cut tip)")]
    DivisionBlowup { magnitude: f64 },

    #[error("limit extrapolation diverges: {0}")]
    Divergent(String),

    #[error("root solve did not converge: {0}")]
    NonConvergence(String),

    #[error("not a moment sequence to order {order}: array entry c[{row},{index}] = {value} < 0")]
    NegativeArrayEntry {
        order: usize,
        row: usize,
        index: usize,
        value: String,
    },

    #[error("unintegrable endpoint singularity exponent {0} (must be > -1)")]
    Unintegrable(f64),

    #[error("unsupported density: {0}")]
    UnsupportedDensity(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
