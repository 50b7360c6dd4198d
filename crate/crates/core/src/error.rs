use thiserror::Error;

/// Errors raised by the bound library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("alphabet mismatch: {left} vs {right} symbols")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("covariance is not positive definite")]
    NotPositiveDefinite,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("argument out of range: {name} = {value} ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("tangent bound unusable: left derivative is {0}")]
    ZeroDerivative(f64),

    #[error("monotonicity check failed: {0}")]
    Monotonicity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, BoundError>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    expected: &'static str,
) -> Result<()> {
    if value.is_nan() || value < lo || value > hi {
        Err(BoundError::OutOfRange {
            name,
            value,
            expected,
        })
    } else {
        Ok(())
    }
}
