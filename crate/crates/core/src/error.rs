use thiserror::Error;

/// Errors produced by the vilenkin library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("operands live on different bases")]
    BasisMismatch,

    #[error("{what} {value} out of range (must be {bound})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        bound: String,
    },

    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid exponent p = {0} (need 1 <= p <= inf)")]
    InvalidExponent(f64),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("partial weight sum Q_{0} is zero")]
    ZeroPartialSum(usize),

    #[error("zero weight q_{0} in a denominator")]
    ZeroWeight(usize),

    #[error("weights are {found}, expected {expected}")]
    WrongMonotonicity {
        expected: &'static str,
        found: &'static str,
    },

    #[error("weights fail (Cond): n/Q_n grows from {start:.4} to {end:.4} over n <= {n_max}")]
    FailsCondition { start: f64, end: f64, n_max: usize },

    #[error("weights are not regular over n <= {n_max}: q_(n-1)/Q_n = {end:.4}")]
    NotRegular { end: f64, n_max: usize },

    #[error("gamma = {0} outside (1, 2]")]
    InvalidGamma(f64),

    #[error("invalid smoothness alpha = {0} (need alpha > 0)")]
    InvalidAlpha(f64),

    #[error("degenerate grid: {0} points (need at least 3)")]
    DegenerateGrid(usize),

    #[error("check is inapplicable: {0}")]
    Inapplicable(&'static str),

    #[error("invalid specification `{0}`")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
