use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("point {x} lies outside [{a}, {b}]")]
    OutOfRange { x: f64, a: f64, b: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("nonpositive denominator {value} at index {index} ({context})")]
    Denominator {
        context: &'static str,
        index: usize,
        value: f64,
    },

    #[error("overlap entries disagree: left {left}, right {right}")]
    Overlap { left: f64, right: f64 },

    #[error("derivative order {order} not available (have {available})")]
    MissingOrder { order: usize, available: usize },

    #[error("greville abscissae need degree >= 1 on every interval (interval {0} has degree 0)")]
    GrevilleDegree(usize),

    #[error("invalid plan: {0}")]
    Plan(String),

    #[error("{0}")]
    Input(String),
}

impl Error {
    /// Validation-type failures map to exit code 1, everything else to 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpace(_) | Error::OutOfRange { .. } | Error::Plan(_) | Error::Input(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
