//! Error type shared by all simulator modules.

use crate::lhv::Representation;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A squeeze parameter outside [0, ∞) or not finite.
    #[error("squeeze parameter must be finite and nonnegative, got {0}")]
    InvalidSqueeze(f64),

    /// A hidden-variable component or analyzer angle that is NaN or infinite.
    #[error("non-finite {what}")]
    NonFiniteInput { what: &'static str },

    /// Requested sample batch cannot be allocated.
    #[error("cannot allocate batch of {requested} samples")]
    Capacity { requested: usize },

    /// Count rates of one representation pushed into an accumulator holding
    /// the other.
    #[error("accumulator holds {expected:?} rates, got {got:?}")]
    RepresentationMismatch {
        expected: Representation,
        got: Representation,
    },

    /// The normalizing denominator of the correlation ratio is consistent
    /// with zero; the correlation E is undefined (0/0).
    #[error(
        "degenerate correlation denominator: |{denominator:e}| <= {threshold:e} \
         (epsilon {epsilon:e})"
    )]
    DegenerateDenominator {
        denominator: f64,
        threshold: f64,
        epsilon: f64,
    },

    /// An estimator was invoked with too few samples or chunks.
    #[error("invalid estimator setup: {0}")]
    InvalidEstimator(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
