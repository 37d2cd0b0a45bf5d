use thiserror::Error;

/// Errors raised by the operators, steppers and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: max |a_ij - a_ji| = {max_asymmetry:e} exceeds {tolerance:e}")]
    NonSymmetric { max_asymmetry: f64, tolerance: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is indefinite: eigenvalue {eigenvalue:e} is below the clamp threshold {threshold:e}")]
    IndefiniteOperator { eigenvalue: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value produced at step {step}")]
    NonFinite { step: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("step count {steps} exceeds the limit {limit}")]
    StepCountOverflow { steps: f64, limit: u64 },

    #[error("growth indicator is singular: |1 - 4*eps*lambda| = {value:e}")]
    SingularIndicator { value: f64 },

    #[error(
        "negative discriminant D = 1 - 4*lambda*eps = {discriminant:e} for lambda = {lambda:e}; \
         the closed-form hyperbolic-model solution requires D > 0"
    )]
    NegativeDiscriminant { lambda: f64, discriminant: f64 },

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::NegativeDiscriminant { .. }
                | Error::SingularIndicator { .. }
                | Error::IndefiniteOperator { .. }
        )
    }

    /// True for rejected configuration or malformed input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::InsufficientData { .. }
                | Error::DimensionMismatch { .. }
                | Error::NotSquare { .. }
                | Error::NonSymmetric { .. }
                | Error::StepCountOverflow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
