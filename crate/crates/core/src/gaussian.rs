//! The joint hidden-variable distribution.
//!
//! Six complex hidden variables `E_1 … E_6` carry the full state of one
//! simulated run. Their joint density factorizes into two correlated pairs
//! and two vacuum singles:
//!
//! ```text
//! P(E_1,…,E_6) = W_sq(E_1,E_2) · W_sq(E_3,E_4) · W_vac(E_5) · W_vac(E_6)
//! W_sq(E,E')   = 4 exp[-(2+4χ²)(|E|²+|E'|²) + 8χ√(1+χ²) Re(EE')] / π²
//! W_vac(E)     = 2 exp(-2|E|²) / π
//! ```
//!
//! Completing the square shows each correlated pair is Gaussian in its four
//! real components with, per component,
//!
//! ```text
//! Var(Re Eᵢ) = Var(Im Eᵢ)        = (1+2χ²)/4
//! Cov(Re E₁, Re E₂)              = +χ√(1+χ²)/2
//! Cov(Im E₁, Im E₂)              = -χ√(1+χ²)/2
//! ```
//!
//! and the vacuum components have variance 1/4. Those block moments are the
//! canonical internal representation: both the sampler and the analytic
//! moment tables are built from them, and the test suite cross-checks them
//! against direct numerical quadrature of the density.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{GaussianSource, RandomStream};

/// Dimensionless squeezing strength χ ≥ 0.
///
/// χ is an abstract model parameter; no correspondence to a physical
/// squeezing parameter is implied. Component variances grow as χ², so large
/// values simply widen the distribution (tests cap at χ = 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParameter(f64);

impl SqueezeParameter {
    pub fn new(chi: f64) -> Result<Self> {
        if !chi.is_finite() || chi < 0.0 {
            return Err(Error::InvalidSqueeze(chi));
        }
        Ok(Self(chi))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// One draw of the six complex hidden variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenVariableSample {
    pub e1: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
    pub e4: Complex64,
    pub e5: Complex64,
    pub e6: Complex64,
}

impl HiddenVariableSample {
    pub fn new(components: [Complex64; 6]) -> Result<Self> {
        let sample = Self::from_array(components);
        if !sample.is_finite() {
            return Err(Error::NonFiniteInput {
                what: "hidden-variable component",
            });
        }
        Ok(sample)
    }

    pub fn from_array([e1, e2, e3, e4, e5, e6]: [Complex64; 6]) -> Self {
        Self {
            e1,
            e2,
            e3,
            e4,
            e5,
            e6,
        }
    }

    pub fn as_array(&self) -> [Complex64; 6] {
        [self.e1, self.e2, self.e3, self.e4, self.e5, self.e6]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array()
            .iter()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }
}

/// Real-component block moments of the joint distribution for one χ.
///
/// Immutable after construction; freely shareable across threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceModel {
    chi: SqueezeParameter,
    /// Variance of each real component of E_1…E_4: (1+2χ²)/4.
    var_sq: f64,
    /// Covariance of (Re E_1, Re E_2) and (Re E_3, Re E_4): +χ√(1+χ²)/2.
    cov_x: f64,
    /// Covariance of (Im E_1, Im E_2) and (Im E_3, Im E_4): -χ√(1+χ²)/2.
    cov_y: f64,
    /// Variance of each real component of E_5, E_6: 1/4.
    var_vac: f64,
}

/// Block model realizing the joint density for the given χ.
pub fn build_covariance(chi: SqueezeParameter) -> CovarianceModel {
    let c = chi.value();
    let cov = c * (1.0 + c * c).sqrt() / 2.0;
    CovarianceModel {
        chi,
        var_sq: (1.0 + 2.0 * c * c) / 4.0,
        cov_x: cov,
        cov_y: -cov,
        var_vac: 0.25,
    }
}

impl CovarianceModel {
    /// Convenience constructor validating the raw χ value.
    pub fn for_chi(chi: f64) -> Result<Self> {
        Ok(build_covariance(SqueezeParameter::new(chi)?))
    }

    pub fn chi(&self) -> f64 {
        self.chi.value()
    }

    pub fn var_sq(&self) -> f64 {
        self.var_sq
    }

    pub fn cov_x(&self) -> f64 {
        self.cov_x
    }

    pub fn cov_y(&self) -> f64 {
        self.cov_y
    }

    pub fn var_vac(&self) -> f64 {
        self.var_vac
    }

    /// Joint density P(E_1,…,E_6), evaluated literally as the product of
    /// the two squeezed-pair factors and the two vacuum factors.
    ///
    /// Strictly positive for every finite sample; this is what makes the
    /// construction a valid hidden-variable distribution rather than a
    /// quasi-probability.
    pub fn density(&self, sample: &HiddenVariableSample) -> f64 {
        let chi = self.chi.value();
        squeezed_pair_density(chi, sample.e1, sample.e2)
            * squeezed_pair_density(chi, sample.e3, sample.e4)
            * vacuum_density(sample.e5)
            * vacuum_density(sample.e6)
    }

    /// `n` independent draws, deterministic in `stream`.
    ///
    /// Per sample, six Box–Muller pairs are consumed in a fixed order:
    /// (Re E_1, Re E_2), (Im E_1, Im E_2), (Re E_3, Re E_4),
    /// (Im E_3, Im E_4), (Re E_5, Im E_5), (Re E_6, Im E_6). Each
    /// correlated pair is formed through the closed-form 2×2 Cholesky
    /// factor of its block.
    pub fn sample_batch(&self, stream: RandomStream, n: usize) -> Result<Vec<HiddenVariableSample>> {
        if n == 0 {
            return Err(Error::InvalidEstimator("sample batch size must be >= 1"));
        }
        let mut batch = Vec::new();
        batch
            .try_reserve_exact(n)
            .map_err(|_| Error::Capacity { requested: n })?;
        let mut sampler = self.sampler(stream);
        batch.extend(std::iter::repeat_with(|| sampler.next_sample()).take(n));
        Ok(batch)
    }

    /// Streaming sampler over one substream; the batched and streaming
    /// paths produce identical sequences.
    pub fn sampler(&self, stream: RandomStream) -> Sampler {
        Sampler {
            factor: BlockCholesky::new(self),
            source: GaussianSource::new(stream),
        }
    }

    /// Full 12×12 covariance table of the real components, in closed form.
    pub fn exact_second_moments(&self) -> SecondMoments {
        let mut table = [[0.0; 12]; 12];
        for mode in 0..4 {
            table[2 * mode][2 * mode] = self.var_sq;
            table[2 * mode + 1][2 * mode + 1] = self.var_sq;
        }
        for mode in 4..6 {
            table[2 * mode][2 * mode] = self.var_vac;
            table[2 * mode + 1][2 * mode + 1] = self.var_vac;
        }
        for pair in [(0usize, 1usize), (2, 3)] {
            let (a, b) = pair;
            table[2 * a][2 * b] = self.cov_x;
            table[2 * b][2 * a] = self.cov_x;
            table[2 * a + 1][2 * b + 1] = self.cov_y;
            table[2 * b + 1][2 * a + 1] = self.cov_y;
        }
        SecondMoments { table }
    }
}

/// Squeezed-pair factor W_sq(E, E').
pub fn squeezed_pair_density(chi: f64, e: Complex64, ep: Complex64) -> f64 {
    let quad = (2.0 + 4.0 * chi * chi) * (e.norm_sqr() + ep.norm_sqr());
    let cross = 8.0 * chi * (1.0 + chi * chi).sqrt() * (e * ep).re;
    4.0 * (cross - quad).exp() / (std::f64::consts::PI * std::f64::consts::PI)
}

/// Vacuum factor W_vac(E).
pub fn vacuum_density(e: Complex64) -> f64 {
    2.0 * (-2.0 * e.norm_sqr()).exp() / std::f64::consts::PI
}

/// Closed-form Cholesky factor of the 2×2 block [[v, c], [c, v]]:
/// L = [[√v, 0], [c/√v, √((v²-c²)/v)]] with v²-c² = 1/16 for every χ.
struct BlockCholesky {
    l11: f64,
    l21_x: f64,
    l21_y: f64,
    l22: f64,
    vac_sd: f64,
}

impl BlockCholesky {
    fn new(model: &CovarianceModel) -> Self {
        let sqrt_v = model.var_sq.sqrt();
        Self {
            l11: sqrt_v,
            l21_x: model.cov_x / sqrt_v,
            l21_y: model.cov_y / sqrt_v,
            l22: 1.0 / (4.0 * sqrt_v),
            vac_sd: model.var_vac.sqrt(),
        }
    }
}

/// Iterator-style sample generator bound to one substream.
pub struct Sampler {
    factor: BlockCholesky,
    source: GaussianSource,
}

impl Sampler {
    pub fn next_sample(&mut self) -> HiddenVariableSample {
        let f = &self.factor;
        let (zx1, zx2) = self.source.next_pair();
        let (zy1, zy2) = self.source.next_pair();
        let e1 = Complex64::new(f.l11 * zx1, f.l11 * zy1);
        let e2 = Complex64::new(
            f.l21_x * zx1 + f.l22 * zx2,
            f.l21_y * zy1 + f.l22 * zy2,
        );

        let (zx3, zx4) = self.source.next_pair();
        let (zy3, zy4) = self.source.next_pair();
        let e3 = Complex64::new(f.l11 * zx3, f.l11 * zy3);
        let e4 = Complex64::new(
            f.l21_x * zx3 + f.l22 * zx4,
            f.l21_y * zy3 + f.l22 * zy4,
        );

        let (x5, y5) = self.source.next_pair();
        let (x6, y6) = self.source.next_pair();
        let e5 = Complex64::new(f.vac_sd * x5, f.vac_sd * y5);
        let e6 = Complex64::new(f.vac_sd * x6, f.vac_sd * y6);

        HiddenVariableSample {
            e1,
            e2,
            e3,
            e4,
            e5,
            e6,
        }
    }
}

/// 12×12 covariance table of the real components, ordered
/// `[Re E_1, Im E_1, Re E_2, Im E_2, …, Re E_6, Im E_6]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMoments {
    pub table: [[f64; 12]; 12],
}

impl SecondMoments {
    /// Covariance of two real components by table index.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.table[i][j]
    }

    /// ⟨|E_k|²⟩ for zero-mean components, mode index 0..6.
    pub fn mean_abs_squared(&self, mode: usize) -> f64 {
        self.table[2 * mode][2 * mode] + self.table[2 * mode + 1][2 * mode + 1]
    }

    /// ⟨E_a E_b⟩ as a complex number, mode indices 0..6.
    pub fn mean_product(&self, a: usize, b: usize) -> Complex64 {
        let (xa, ya) = (2 * a, 2 * a + 1);
        let (xb, yb) = (2 * b, 2 * b + 1);
        Complex64::new(
            self.table[xa][xb] - self.table[ya][yb],
            self.table[xa][yb] + self.table[ya][xb],
        )
    }

    /// ⟨E_a E_b*⟩ as a complex number, mode indices 0..6.
    pub fn mean_product_conj(&self, a: usize, b: usize) -> Complex64 {
        let (xa, ya) = (2 * a, 2 * a + 1);
        let (xb, yb) = (2 * b, 2 * b + 1);
        Complex64::new(
            self.table[xa][xb] + self.table[ya][yb],
            self.table[ya][xb] - self.table[xa][yb],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn model(chi: f64) -> CovarianceModel {
        CovarianceModel::for_chi(chi).unwrap()
    }

    #[test]
    fn rejects_invalid_chi() {
        assert!(SqueezeParameter::new(-0.1).is_err());
        assert!(SqueezeParameter::new(f64::NAN).is_err());
        assert!(SqueezeParameter::new(f64::INFINITY).is_err());
        assert!(SqueezeParameter::new(0.0).is_ok());
    }

    #[test]
    fn covariance_at_chi_zero_is_pure_vacuum() {
        let m = model(0.0);
        assert_eq!(m.var_sq(), 0.25);
        assert_eq!(m.cov_x(), 0.0);
        assert_eq!(m.cov_y(), 0.0);
        assert_eq!(m.var_vac(), 0.25);
    }

    #[test]
    fn covariance_at_chi_one() {
        let m = model(1.0);
        assert_relative_eq!(m.var_sq(), 0.75, max_relative = 1e-15);
        assert_relative_eq!(m.cov_x(), std::f64::consts::SQRT_2 / 2.0, max_relative = 1e-15);
        assert_relative_eq!(m.cov_y(), -std::f64::consts::SQRT_2 / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn covariance_at_chi_point_two() {
        let m = model(0.2);
        assert_relative_eq!(m.var_sq(), 0.27, max_relative = 1e-15);
        assert_relative_eq!(m.cov_x(), 0.2 * 1.04f64.sqrt() / 2.0, max_relative = 1e-15);
        assert_abs_diff_eq!(m.cov_x(), 0.10198, epsilon = 1e-5);
        assert_relative_eq!(m.cov_y(), -m.cov_x(), max_relative = 1e-15);
    }

    #[test]
    fn block_is_positive_definite_up_to_chi_two() {
        for chi in [0.0, 0.1, 0.5, 1.0, 1.5, 2.0] {
            let m = model(chi);
            let det = m.var_sq() * m.var_sq() - m.cov_x() * m.cov_x();
            assert_relative_eq!(det, 1.0 / 16.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn density_at_origin_is_64_over_pi_six() {
        let zero = HiddenVariableSample::from_array([Complex64::new(0.0, 0.0); 6]);
        let expected = 64.0 / std::f64::consts::PI.powi(6);
        for chi in [0.0, 0.2, 1.0] {
            assert_relative_eq!(model(chi).density(&zero), expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn density_at_chi_zero_factorizes_into_vacuum_factors() {
        let m = model(0.0);
        let sample = HiddenVariableSample::from_array([
            Complex64::new(0.3, -0.1),
            Complex64::new(-0.5, 0.2),
            Complex64::new(0.1, 0.7),
            Complex64::new(0.0, -0.4),
            Complex64::new(0.6, 0.6),
            Complex64::new(-0.2, 0.0),
        ]);
        let product: f64 = sample.as_array().iter().map(|&e| vacuum_density(e)).product();
        assert_relative_eq!(m.density(&sample), product, max_relative = 1e-13);
    }

    #[test]
    fn sample_batch_is_deterministic() {
        let m = model(0.7);
        let stream = RandomStream::new(0xBE11, 3);
        let a = m.sample_batch(stream, 257).unwrap();
        let b = m.sample_batch(stream, 257).unwrap();
        assert_eq!(a, b);
        let c = m.sample_batch(stream.substream(1), 257).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn vacuum_batch_moments() {
        let m = model(0.0);
        let n = 100_000usize;
        let batch = m.sample_batch(RandomStream::new(0x5EED, 0), n).unwrap();
        let mut sums = [0.0f64; 12];
        let mut sq = [0.0f64; 12];
        let mut cross_re12 = 0.0f64;
        let mut cross_im12 = 0.0f64;
        for s in &batch {
            let comps = real_components(s);
            for (i, &v) in comps.iter().enumerate() {
                sums[i] += v;
                sq[i] += v * v;
            }
            cross_re12 += comps[0] * comps[2];
            cross_im12 += comps[1] * comps[3];
        }
        let nf = n as f64;
        // 5 standard errors; variance of x² for N(0, 1/4) is 2·(1/4)².
        let se_var = (2.0 * 0.25 * 0.25 / nf).sqrt();
        let se_cov = (0.25 * 0.25 / nf).sqrt();
        for i in 0..12 {
            let mean = sums[i] / nf;
            let var = sq[i] / nf - mean * mean;
            assert!((var - 0.25).abs() < 5.0 * se_var, "var[{i}] = {var}");
        }
        assert!((cross_re12 / nf).abs() < 5.0 * se_cov);
        assert!((cross_im12 / nf).abs() < 5.0 * se_cov);
    }

    #[test]
    fn squeezed_batch_covariances_at_chi_one() {
        let m = model(1.0);
        let n = 1_000_000usize;
        let mut sampler = m.sampler(RandomStream::new(0x5EED, 1));
        let mut cov_x = 0.0f64;
        let mut cov_y = 0.0f64;
        for _ in 0..n {
            let s = sampler.next_sample();
            cov_x += s.e1.re * s.e2.re;
            cov_y += s.e1.im * s.e2.im;
        }
        let nf = n as f64;
        // Var(x₁x₂) = v² + c² for zero-mean jointly Gaussian components.
        let v = m.var_sq();
        let c = m.cov_x();
        let se = ((v * v + c * c) / nf).sqrt();
        let target = std::f64::consts::SQRT_2 / 2.0;
        assert!((cov_x / nf - target).abs() < 5.0 * se, "cov_x = {}", cov_x / nf);
        assert!((cov_y / nf + target).abs() < 5.0 * se, "cov_y = {}", cov_y / nf);
    }

    #[test]
    fn second_moment_table_values() {
        let m0 = model(0.0);
        let t0 = m0.exact_second_moments();
        assert_eq!(t0.mean_abs_squared(0), 0.5);
        assert_eq!(t0.mean_product(0, 1), Complex64::new(0.0, 0.0));

        let m = model(0.2);
        let t = m.exact_second_moments();
        assert_relative_eq!(t.mean_abs_squared(0), 0.54, max_relative = 1e-15);
        assert_abs_diff_eq!(t.mean_product(0, 1).re, 0.20396, epsilon = 1e-5);
        assert_eq!(t.mean_product(0, 1).im, 0.0);
        assert_eq!(t.mean_product_conj(0, 1), Complex64::new(0.0, 0.0));
        assert_eq!(t.mean_product(0, 0).re, 0.0);
        assert_eq!(t.mean_abs_squared(4), 0.5);

        let t1 = model(1.0).exact_second_moments();
        assert_relative_eq!(
            t1.mean_product(0, 1).re,
            std::f64::consts::SQRT_2,
            max_relative = 1e-15
        );
        // Modes outside the listed pairings are uncorrelated.
        assert_eq!(t1.mean_product(0, 2), Complex64::new(0.0, 0.0));
        assert_eq!(t1.mean_product(0, 3), Complex64::new(0.0, 0.0));
        assert_eq!(t1.mean_product(4, 5), Complex64::new(0.0, 0.0));
        assert_eq!(t1.covariance(8, 0), 0.0);
    }

    #[test]
    fn batch_rejects_zero_samples() {
        assert!(model(0.1).sample_batch(RandomStream::new(0, 0), 0).is_err());
    }

    pub(crate) fn real_components(s: &HiddenVariableSample) -> [f64; 12] {
        let mut out = [0.0; 12];
        for (mode, e) in s.as_array().iter().enumerate() {
            out[2 * mode] = e.re;
            out[2 * mode + 1] = e.im;
        }
        out
    }
}
