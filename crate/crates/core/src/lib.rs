//! Monte Carlo simulator and exact oracle for a local-hidden-variable
//! account of quadrature Bell tests on a two-mode squeezed source.
//!
//! Six complex hidden variables drawn from a manifestly positive Gaussian
//! distribution ([`gaussian`]) determine local quadrature realities and
//! two kinds of count-rate realities ([`lhv`]). Estimating the normalized
//! intensity correlation and its CHSH combination from those rates
//! ([`bell`]) reproduces an apparent |S| > 2 at small squeezing even
//! though every sample is generated locally: the count-rate realities are
//! not guaranteed nonnegative, which breaks the assumption the |S| ≤ 2
//! bound rests on. The [`oracle`] module carries the closed-form Gaussian
//! moments every simulated number is validated against, including the
//! negative-rate probabilities that quantify the positivity failure.
//!
//! All sampling is reproducible: substreams are addressed explicitly
//! ([`rng`]) and estimates are independent of worker count.

pub mod bell;
pub mod error;
pub mod gaussian;
pub mod lhv;
pub mod oracle;
pub mod rng;

pub use num_complex::Complex64;

pub use bell::{
    bell_estimate, correlation_from_chunks, estimate_correlation, positivity_report,
    sign_bell_estimate, sweep_chi, BellEstimate, CorrelationEstimate, JointMomentAccumulator,
    NegativeFraction, PositivityReport, RunConfig, SignBellEstimate, SweepPoint, DEFAULT_EPSILON,
    RATE_LABELS,
};
pub use error::{Error, Result};
pub use gaussian::{
    build_covariance, CovarianceModel, HiddenVariableSample, SecondMoments, SqueezeParameter,
};
pub use lhv::{
    count_rates_from_quadratures, dark_noise_rates, quadrature_realities, rates_for,
    wigner_intensity_rates, AnalyzerSettings, CountRatePair, PhaseIndex, QuadratureRealities,
    Representation, Side, Sign,
};
pub use oracle::BellAngles;
pub use rng::RandomStream;
