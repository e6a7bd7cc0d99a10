use thiserror::Error;

/// Errors raised by construction, evaluation and certification.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("derivative order {requested} exceeds the configured maximum {max}")]
    OrderLimit { requested: usize, max: usize },

    #[error("precision exhausted at {bits} bits: rounding bound does not meet the target")]
    PrecisionExhausted { bits: u32 },

    #[error("truncation exhausted: no order up to {max_order} meets the target")]
    TruncationExhausted { max_order: usize },

    #[error("theta certification failed for k = {k}")]
    ThetaUnavailable { k: u32 },

    #[error("time {t} is below the evaluation floor {floor}")]
    BelowTimeFloor { t: f64, floor: f64 },

    #[error("Cole-Hopf denominator |phi| = {magnitude:e} below guard {guard:e} at x = {x}, t = {t}")]
    NearPole {
        x: f64,
        t: f64,
        magnitude: f64,
        guard: f64,
    },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureTolerance { tolerance: f64, estimate: f64 },

    #[error("incompatible inputs: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// Errors that mean "could not certify with the available resources" rather than
    /// a violated mathematical inequality or bad input.
    pub fn is_inconclusive(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. }
                | Error::TruncationExhausted { .. }
                | Error::QuadratureTolerance { .. }
                | Error::OrderLimit { .. }
        )
    }
}
