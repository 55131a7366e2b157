//! Local realities and count-rate realities.
//!
//! Each hidden-variable sample, together with the two analyzer angles,
//! determines twelve real quadrature values
//!
//! ```text
//! X^+_{A;l} = 2 Re(e^{iφ_l} (E_1 cosθ_A + E_3 sinθ_A))
//! X^-_{A;l} = 2 Re(e^{iφ_l} (E_3 cosθ_A - E_1 sinθ_A))
//! X_{va;l}  = 2 Re(e^{iφ_l} E_5)
//! ```
//!
//! with φ_1 = 0, φ_2 = π/2, and the apparatus-B analogues built from
//! (E_2, E_4, E_6) and θ_B. Count-rate realities come in two co-equal
//! representations that are kept distinct behind a tag and never silently
//! converted:
//!
//! * [`Representation::QuadratureDerived`]: squared signal quadratures
//!   minus the squared dark-noise quadratures,
//!   `R = X²_{;1} + X²_{;2} - X²_{v;1} - X²_{v;2}`;
//! * [`Representation::WignerIntensity`]: the intensity form
//!   `R = |F|² - 1/2` with the offset retained exactly.
//!
//! Nothing constrains either form to be nonnegative; negative count-rate
//! realities are the model's central feature, not an error state.
//!
//! Angles are used as given: the trigonometric functions are applied to the
//! raw θ values with no modular reduction.

use num_complex::Complex64;

use crate::gaussian::HiddenVariableSample;

/// Analyzer angles (radians) for apparatus A and B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSettings {
    pub theta_a: f64,
    pub theta_b: f64,
}

impl AnalyzerSettings {
    pub fn new(theta_a: f64, theta_b: f64) -> Self {
        Self { theta_a, theta_b }
    }

    pub fn is_finite(&self) -> bool {
        self.theta_a.is_finite() && self.theta_b.is_finite()
    }

    /// Canonical representative with both angles reduced into [0, π).
    /// Available for reporting; never applied implicitly.
    pub fn reduced_mod_pi(&self) -> Self {
        Self {
            theta_a: self.theta_a.rem_euclid(std::f64::consts::PI),
            theta_b: self.theta_b.rem_euclid(std::f64::consts::PI),
        }
    }
}

/// The two quadrature phases: φ_1 = 0 and φ_2 = π/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseIndex {
    First,
    Second,
}

impl PhaseIndex {
    pub const ALL: [PhaseIndex; 2] = [PhaseIndex::First, PhaseIndex::Second];

    pub fn phase(self) -> f64 {
        match self {
            PhaseIndex::First => 0.0,
            PhaseIndex::Second => std::f64::consts::FRAC_PI_2,
        }
    }

    fn slot(self) -> usize {
        match self {
            PhaseIndex::First => 0,
            PhaseIndex::Second => 1,
        }
    }
}

/// The twelve local quadrature values for one sample and one angle pair,
/// indexed `[l-1]` for l ∈ {1, 2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRealities {
    pub a_plus: [f64; 2],
    pub a_minus: [f64; 2],
    pub b_plus: [f64; 2],
    pub b_minus: [f64; 2],
    pub vac_a: [f64; 2],
    pub vac_b: [f64; 2],
}

impl QuadratureRealities {
    pub fn value(&self, side: Side, sign: Sign, l: PhaseIndex) -> f64 {
        match (side, sign) {
            (Side::A, Sign::Plus) => self.a_plus[l.slot()],
            (Side::A, Sign::Minus) => self.a_minus[l.slot()],
            (Side::B, Sign::Plus) => self.b_plus[l.slot()],
            (Side::B, Sign::Minus) => self.b_minus[l.slot()],
        }
    }

    pub fn vacuum(&self, side: Side, l: PhaseIndex) -> f64 {
        match side {
            Side::A => self.vac_a[l.slot()],
            Side::B => self.vac_b[l.slot()],
        }
    }
}

/// Apparatus label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Detector output port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

/// How a set of count-rate realities was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Squared quadratures with per-sample dark-noise subtraction.
    QuadratureDerived,
    /// Wigner intensity form with the constant -1/2 offsets.
    WignerIntensity,
}

impl Representation {
    pub const ALL: [Representation; 2] =
        [Representation::QuadratureDerived, Representation::WignerIntensity];

    /// Token used on the command line and in output files.
    pub fn token(self) -> &'static str {
        match self {
            Representation::QuadratureDerived => "eq3",
            Representation::WignerIntensity => "eq4",
        }
    }
}

impl std::str::FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eq3" | "quadrature" | "quadrature-derived" => Ok(Representation::QuadratureDerived),
            "eq4" | "intensity" | "wigner-intensity" => Ok(Representation::WignerIntensity),
            other => Err(format!(
                "unknown representation {other:?} (expected eq3 or eq4)"
            )),
        }
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

/// The four count-rate realities of one sample under one representation.
/// Values may be negative; that is the point of the model, not a bug.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRatePair {
    pub r_a_plus: f64,
    pub r_a_minus: f64,
    pub r_b_plus: f64,
    pub r_b_minus: f64,
    pub representation: Representation,
}

impl CountRatePair {
    pub fn rate(&self, side: Side, sign: Sign) -> f64 {
        match (side, sign) {
            (Side::A, Sign::Plus) => self.r_a_plus,
            (Side::A, Sign::Minus) => self.r_a_minus,
            (Side::B, Sign::Plus) => self.r_b_plus,
            (Side::B, Sign::Minus) => self.r_b_minus,
        }
    }

    pub fn rates(&self) -> [f64; 4] {
        [self.r_a_plus, self.r_a_minus, self.r_b_plus, self.r_b_minus]
    }

    /// All four rates multiplied by a constant, representation unchanged.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            r_a_plus: factor * self.r_a_plus,
            r_a_minus: factor * self.r_a_minus,
            r_b_plus: factor * self.r_b_plus,
            r_b_minus: factor * self.r_b_minus,
            representation: self.representation,
        }
    }
}

/// Phased mode amplitudes of one sample at one angle pair. The A side uses
/// only (E_1, E_3, E_5, θ_A) and the B side only (E_2, E_4, E_6, θ_B).
#[derive(Debug, Clone, Copy)]
struct ModeAmplitudes {
    f_a_plus: Complex64,
    f_a_minus: Complex64,
    f_b_plus: Complex64,
    f_b_minus: Complex64,
}

fn mode_amplitudes(sample: &HiddenVariableSample, settings: &AnalyzerSettings) -> ModeAmplitudes {
    let (sin_a, cos_a) = settings.theta_a.sin_cos();
    let (sin_b, cos_b) = settings.theta_b.sin_cos();
    ModeAmplitudes {
        f_a_plus: sample.e1 * cos_a + sample.e3 * sin_a,
        f_a_minus: sample.e3 * cos_a - sample.e1 * sin_a,
        f_b_plus: sample.e2 * cos_b + sample.e4 * sin_b,
        f_b_minus: sample.e4 * cos_b - sample.e2 * sin_b,
    }
}

/// X = e^{iφ_l}F + c.c. for both phases: [2 Re F, -2 Im F].
#[inline]
fn phased_quadratures(f: Complex64) -> [f64; 2] {
    [2.0 * f.re, -2.0 * f.im]
}

/// The twelve local quadrature realities of one sample.
pub fn quadrature_realities(
    sample: &HiddenVariableSample,
    settings: &AnalyzerSettings,
) -> QuadratureRealities {
    let amps = mode_amplitudes(sample, settings);
    QuadratureRealities {
        a_plus: phased_quadratures(amps.f_a_plus),
        a_minus: phased_quadratures(amps.f_a_minus),
        b_plus: phased_quadratures(amps.f_b_plus),
        b_minus: phased_quadratures(amps.f_b_minus),
        vac_a: phased_quadratures(sample.e5),
        vac_b: phased_quadratures(sample.e6),
    }
}

#[inline]
fn pair_norm_sq(x: [f64; 2]) -> f64 {
    x[0] * x[0] + x[1] * x[1]
}

/// Count rates from squared quadratures with the dark-noise record
/// subtracted sample by sample.
pub fn count_rates_from_quadratures(q: &QuadratureRealities) -> CountRatePair {
    let dark_a = pair_norm_sq(q.vac_a);
    let dark_b = pair_norm_sq(q.vac_b);
    CountRatePair {
        r_a_plus: pair_norm_sq(q.a_plus) - dark_a,
        r_a_minus: pair_norm_sq(q.a_minus) - dark_a,
        r_b_plus: pair_norm_sq(q.b_plus) - dark_b,
        r_b_minus: pair_norm_sq(q.b_minus) - dark_b,
        representation: Representation::QuadratureDerived,
    }
}

/// Count rates in the Wigner intensity form, |F|² - 1/2, with the offsets
/// retained exactly.
pub fn wigner_intensity_rates(
    sample: &HiddenVariableSample,
    settings: &AnalyzerSettings,
) -> CountRatePair {
    let amps = mode_amplitudes(sample, settings);
    CountRatePair {
        r_a_plus: amps.f_a_plus.norm_sqr() - 0.5,
        r_a_minus: amps.f_a_minus.norm_sqr() - 0.5,
        r_b_plus: amps.f_b_plus.norm_sqr() - 0.5,
        r_b_minus: amps.f_b_minus.norm_sqr() - 0.5,
        representation: Representation::WignerIntensity,
    }
}

/// Rates for the requested representation.
pub fn rates_for(
    representation: Representation,
    sample: &HiddenVariableSample,
    settings: &AnalyzerSettings,
) -> CountRatePair {
    match representation {
        Representation::QuadratureDerived => {
            count_rates_from_quadratures(&quadrature_realities(sample, settings))
        }
        Representation::WignerIntensity => wigner_intensity_rates(sample, settings),
    }
}

/// The blocked-input auxiliary measurement: the vacuum-only quadrature
/// record that the subtracted representation removes. Both ports of one
/// side see the same dark noise, X²_{v;1} + X²_{v;2} = 4|E|².
pub fn dark_noise_rates(sample: &HiddenVariableSample) -> CountRatePair {
    let dark_a = 4.0 * sample.e5.norm_sqr();
    let dark_b = 4.0 * sample.e6.norm_sqr();
    CountRatePair {
        r_a_plus: dark_a,
        r_a_minus: dark_a,
        r_b_plus: dark_b,
        r_b_minus: dark_b,
        representation: Representation::QuadratureDerived,
    }
}

/// ±1 observables read directly off the hidden variables: the signs of the
/// first-phase plus-port quadratures on each side. Genuine two-valued local
/// observables like these obey the |S| ≤ 2 bound; they are the contrast
/// case for the postprocessed rates.
pub fn sign_observables(
    sample: &HiddenVariableSample,
    settings: &AnalyzerSettings,
) -> (f64, f64) {
    let amps = mode_amplitudes(sample, settings);
    let a = if amps.f_a_plus.re >= 0.0 { 1.0 } else { -1.0 };
    let b = if amps.f_b_plus.re >= 0.0 { 1.0 } else { -1.0 };
    (a, b)
}
