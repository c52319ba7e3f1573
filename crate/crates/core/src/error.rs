use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("time must be finite, got {0}")]
    NonFinite(f64),

    #[error("value {value} outside {range}")]
    OutOfRange { value: f64, range: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("breakpoints must be strictly increasing in [0, 1): {0}")]
    InvalidBreakpoints(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("denominator must be positive")]
    ZeroDenominator,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("quadrature did not converge at s = {s}: estimated error {error_estimate:e}")]
    Quadrature { s: f64, error_estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
