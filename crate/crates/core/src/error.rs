use thiserror::Error;

/// Errors raised by the library. Hypothesis violations of the dimension
/// formulas are *not* errors: those results are computed and tagged.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("no threshold in dimension 1")]
    NoThresholdInDimensionOne,

    #[error("bound not asserted in this regime: {0}")]
    RegimeNotCovered(String),

    #[error("exponent selection undefined: {0}")]
    SelectionUndefined(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("indeterminate at available precision: {0}")]
    Indeterminate(String),

    #[error("inscribed cube leaves [0,1]^n: {0}")]
    CubeOutsideUnitCube(String),

    #[error("count overflow: {0}")]
    Overflow(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
