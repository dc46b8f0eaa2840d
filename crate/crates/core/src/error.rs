use crate::groupoid::GroupoidError;
use crate::theta::ThetaError;

/// Errors raised while evaluating weights, operators and representations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("degenerate weight: {0}")]
    DegenerateWeight(String),
    #[error("negative radicand {value:e} in {context}")]
    NegativeRadicand { value: f64, context: String },
    #[error("spectral parameter {0} is at a pole")]
    PoleAtU(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("operator arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("scalar function vanishes at {0}")]
    ZeroScalar(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Theta(ThetaError::NonConvergent { .. })
                | Error::DegenerateWeight(_)
                | Error::NegativeRadicand { .. }
                | Error::PoleAtU(_)
                | Error::ZeroScalar(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
