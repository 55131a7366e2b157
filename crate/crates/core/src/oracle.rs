//! Closed-form expectation values for the count-rate observables.
//!
//! All Monte Carlo estimates in this crate are validated against the exact
//! Gaussian moments collected here. The mode amplitude reaching one
//! detector port, F = E cosθ + E' sinθ, is a circular complex Gaussian with
//!
//! ```text
//! μ = ⟨|F|²⟩ = (1+2χ²)/2          (independent of θ)
//! ⟨F_A F_B⟩ = χ√(1+χ²) · cosΔ     (equal ports, Δ = θ_A - θ_B)
//! ⟨F_A F_B⟩ = χ√(1+χ²) · sinΔ     (opposite ports, up to sign)
//! ```
//!
//! Wick's theorem then gives ⟨|F_A|²|F_B|²⟩ = μ² + |⟨F_A F_B⟩|², which is
//! everything fourth-order the correlation analysis needs. The closed
//! forms are special-cased to this covariance structure on purpose; the
//! test suite keeps an independent brute-force pairing enumerator over the
//! twelve real components to guard the algebra.

use crate::error::{Error, Result};
use crate::lhv::{Representation, Sign};

/// How an oracle value was derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivationTag {
    SecondMoment,
    FourthMoment,
    CorrelationE,
    BellS,
    MeanRate,
    NegativeFraction,
}

/// An exact expectation with its derivation route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub tag: DerivationTag,
}

impl OracleResult {
    fn new(value: f64, tag: DerivationTag) -> Self {
        Self { value, tag }
    }
}

/// CHSH angle set (θ_A, θ_A′, θ_B, θ_B′), radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellAngles {
    pub theta_a: f64,
    pub theta_a_prime: f64,
    pub theta_b: f64,
    pub theta_b_prime: f64,
}

impl BellAngles {
    pub fn new(theta_a: f64, theta_a_prime: f64, theta_b: f64, theta_b_prime: f64) -> Self {
        Self {
            theta_a,
            theta_a_prime,
            theta_b,
            theta_b_prime,
        }
    }

    /// The four analyzer pairs in CHSH order: (a,b), (a,b′), (a′,b), (a′,b′).
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.theta_a, self.theta_b),
            (self.theta_a, self.theta_b_prime),
            (self.theta_a_prime, self.theta_b),
            (self.theta_a_prime, self.theta_b_prime),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.theta_a.is_finite()
            && self.theta_a_prime.is_finite()
            && self.theta_b.is_finite()
            && self.theta_b_prime.is_finite()
    }
}

impl Default for BellAngles {
    /// The standard maximal-violation set (0, π/4, π/8, 3π/8).
    fn default() -> Self {
        Self::new(
            0.0,
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_8,
            3.0 * std::f64::consts::FRAC_PI_8,
        )
    }
}

/// ⟨|F|²⟩ for one detector port.
fn mean_intensity(chi: f64) -> f64 {
    (1.0 + 2.0 * chi * chi) / 2.0
}

/// χ√(1+χ²), the cross-pair amplitude correlation at Δ = 0.
fn cross_amplitude(chi: f64) -> f64 {
    chi * (1.0 + chi * chi).sqrt()
}

/// Mean count rate ⟨R⟩ of any single port: χ² in the intensity form and
/// 4χ² in the subtracted form, independent of the analyzer angle.
pub fn mean_rate(chi: f64, representation: Representation) -> OracleResult {
    let base = chi * chi;
    let value = match representation {
        Representation::WignerIntensity => base,
        Representation::QuadratureDerived => 4.0 * base,
    };
    OracleResult::new(value, DerivationTag::MeanRate)
}

/// Exact ⟨R^i_A R^j_B⟩ at analyzer separation Δ = θ_A - θ_B.
///
/// Equal ports: χ⁴ + χ²(1+χ²)cos²Δ. Opposite ports: χ⁴ + χ²(1+χ²)sin²Δ.
/// The subtracted representation is exactly 16 times the intensity one.
pub fn joint_moment(
    chi: f64,
    delta: f64,
    signs: (Sign, Sign),
    representation: Representation,
) -> OracleResult {
    let mu = mean_intensity(chi);
    let offset = mu - 0.5; // = χ²
    let c = cross_amplitude(chi);
    let coupling = match signs {
        (Sign::Plus, Sign::Plus) | (Sign::Minus, Sign::Minus) => c * delta.cos(),
        _ => c * delta.sin(),
    };
    let intensity_form = offset * offset + coupling * coupling;
    let value = match representation {
        Representation::WignerIntensity => intensity_form,
        Representation::QuadratureDerived => 16.0 * intensity_form,
    };
    OracleResult::new(value, DerivationTag::FourthMoment)
}

/// Exact normalized correlation E(Δ) = (1+χ²)cos2Δ / (1+3χ²), identical
/// for both representations. At χ = 0 all four product means vanish and
/// the ratio is undefined.
pub fn correlation_e(chi: f64, delta: f64) -> Result<OracleResult> {
    if chi == 0.0 {
        return Err(Error::DegenerateDenominator {
            denominator: 0.0,
            threshold: 0.0,
            epsilon: 0.0,
        });
    }
    let value = (1.0 + chi * chi) * (2.0 * delta).cos() / (1.0 + 3.0 * chi * chi);
    Ok(OracleResult::new(value, DerivationTag::CorrelationE))
}

/// Exact CHSH combination S = E(a,b) - E(a,b′) + E(a′,b) + E(a′,b′).
/// At the default angle set this is 2√2(1+χ²)/(1+3χ²).
pub fn bell_s(chi: f64, angles: &BellAngles) -> Result<OracleResult> {
    let [e_ab, e_abp, e_apb, e_apbp] = correlation_e_pairs(chi, angles)?;
    Ok(OracleResult::new(
        e_ab - e_abp + e_apb + e_apbp,
        DerivationTag::BellS,
    ))
}

/// The four exact correlations entering S, in CHSH pair order.
pub fn correlation_e_pairs(chi: f64, angles: &BellAngles) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (slot, (ta, tb)) in angles.pairs().into_iter().enumerate() {
        out[slot] = correlation_e(chi, ta - tb)?.value;
    }
    Ok(out)
}

/// Exact probability that one count-rate reality is negative.
///
/// |F|² is exponentially distributed with mean μ = (1+2χ²)/2, so the
/// intensity form gives P(|F|² < 1/2) = 1 - exp(-1/(1+2χ²)). In the
/// subtracted form the rate is negative when the signal intensity loses to
/// an independent exponential dark record of mean 1/2, which happens with
/// probability (1/2)/(μ + 1/2) = 1/(2+2χ²); at χ = 0 symmetry makes this
/// exactly one half.
pub fn negative_fraction(chi: f64, representation: Representation) -> OracleResult {
    let value = match representation {
        Representation::WignerIntensity => 1.0 - (-1.0 / (1.0 + 2.0 * chi * chi)).exp(),
        Representation::QuadratureDerived => 1.0 / (2.0 + 2.0 * chi * chi),
    };
    OracleResult::new(value, DerivationTag::NegativeFraction)
}

/// ⟨|F|²⟩ exposed for validation tables.
pub fn mean_port_intensity(chi: f64) -> OracleResult {
    OracleResult::new(mean_intensity(chi), DerivationTag::SecondMoment)
}
