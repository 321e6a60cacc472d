use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants are grouped by the CLI exit code they map to (see [`Error::exit_code`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("point has {got} coordinates, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },

    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gate {gate} in layer {layer} violates ||a||_1 + |b| <= 1 (got {norm})")]
    Normalization {
        layer: String,
        gate: usize,
        norm: String,
    },

    #[error("declared degree bound {declared} is below the polynomial degree {actual}")]
    DegreeBoundViolated { declared: usize, actual: usize },

    #[error("post-processing denominator vanishes at x = {point}")]
    DenominatorVanished { point: String },

    #[error("nonvanishing of a non-constant denominator cannot be certified for n = {n} above the exhaustive cap {cap}")]
    UncertifiedDenominator { n: usize, cap: usize },

    #[error("head sum leaves [-1, 1]^d at x = {point}")]
    RangeAssumptionViolated { point: String },

    #[error("n = {n} exceeds the cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("no approximation degree k <= {k_cap} reaches the per-gate error budget {budget}")]
    ApproximationBudgetExceeded { k_cap: usize, budget: f64 },

    #[error("io error: {0}")]
    Io(String),

    #[error("malformed json: {0}")]
    Json(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DenominatorVanished { .. }
            | Error::UncertifiedDenominator { .. }
            | Error::RangeAssumptionViolated { .. } => 3,
            Error::CapExceeded { .. } => 4,
            Error::ApproximationBudgetExceeded { .. } => 5,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
