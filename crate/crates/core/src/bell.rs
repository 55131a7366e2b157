//! Correlation and CHSH estimation from sampled count rates.
//!
//! The normalized correlation for one analyzer pair is the four-product
//! ratio
//!
//! ```text
//! E = (⟨R⁺R⁺⟩ + ⟨R⁻R⁻⟩ - ⟨R⁺R⁻⟩ - ⟨R⁻R⁺⟩) / (⟨R⁺R⁺⟩ + ⟨R⁻R⁻⟩ + ⟨R⁺R⁻⟩ + ⟨R⁻R⁺⟩)
//! ```
//!
//! with ⟨·⟩ the sample mean of per-sample products, and the CHSH parameter
//! is S = E(a,b) - E(a,b′) + E(a′,b) + E(a′,b′) with |S| ≤ 2 for genuine
//! two-valued local observables. This convention is fixed here, in one
//! place, so an alternative normalization could be swapped in.
//!
//! Estimation runs over ≥ 2 (in practice ≥ 32) equally-sized chunks, one
//! accumulator per chunk, each chunk on its own substream. Sums are
//! compensated within chunks and merged in ascending chunk order, so
//! results are independent of how many workers process the chunks. E is a
//! ratio estimator; its error bar comes from jackknifing the chunk totals
//! rather than from a (biased) per-sample variance. The four angle pairs
//! of S use four disjoint substream ranges, mirroring four separate
//! experimental runs, so their errors add in quadrature.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceModel;
use crate::lhv::{rates_for, sign_observables, AnalyzerSettings, CountRatePair, Representation};
use crate::oracle::BellAngles;
use crate::rng::RandomStream;

/// Default relative epsilon for the degenerate-denominator guard.
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Neumaier compensated sum; the merge path replays (sum, compensation) in
/// a fixed order so totals do not depend on worker scheduling.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Product index order: (+,+), (+,-), (-,+), (-,-).
const PP: usize = 0;
const PM: usize = 1;
const MP: usize = 2;
const MM: usize = 3;

/// Rate index order: r_a_plus, r_a_minus, r_b_plus, r_b_minus.
pub const RATE_LABELS: [&str; 4] = ["r_a_plus", "r_a_minus", "r_b_plus", "r_b_minus"];

/// Streaming estimator state for one chunk of one angle pair.
///
/// Tracks the four product sums and sums of squares, the per-rate sums,
/// the per-rate negative-value counters and the sample count. All
/// statistics are symmetric functions of the pushed sample multiset;
/// merging two accumulators adds counts exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMomentAccumulator {
    representation: Representation,
    n: u64,
    product_sums: [CompensatedSum; 4],
    product_sum_sqs: [CompensatedSum; 4],
    rate_sums: [CompensatedSum; 4],
    negative_counts: [u64; 4],
}

impl JointMomentAccumulator {
    pub fn new(representation: Representation) -> Self {
        Self {
            representation,
            n: 0,
            product_sums: Default::default(),
            product_sum_sqs: Default::default(),
            rate_sums: Default::default(),
            negative_counts: [0; 4],
        }
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Fold one sample's count rates into the running sums.
    pub fn push(&mut self, rates: &CountRatePair) -> Result<()> {
        if rates.representation != self.representation {
            return Err(Error::RepresentationMismatch {
                expected: self.representation,
                got: rates.representation,
            });
        }
        let products = [
            rates.r_a_plus * rates.r_b_plus,
            rates.r_a_plus * rates.r_b_minus,
            rates.r_a_minus * rates.r_b_plus,
            rates.r_a_minus * rates.r_b_minus,
        ];
        for (slot, &p) in products.iter().enumerate() {
            self.product_sums[slot].add(p);
            self.product_sum_sqs[slot].add(p * p);
        }
        for (slot, &r) in rates.rates().iter().enumerate() {
            self.rate_sums[slot].add(r);
            if r < 0.0 {
                self.negative_counts[slot] += 1;
            }
        }
        self.n += 1;
        Ok(())
    }

    /// Fold `other` into `self`; callers merge in ascending chunk order.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.representation != self.representation {
            return Err(Error::RepresentationMismatch {
                expected: self.representation,
                got: other.representation,
            });
        }
        for slot in 0..4 {
            self.product_sums[slot].merge(&other.product_sums[slot]);
            self.product_sum_sqs[slot].merge(&other.product_sum_sqs[slot]);
            self.rate_sums[slot].merge(&other.rate_sums[slot]);
            self.negative_counts[slot] += other.negative_counts[slot];
        }
        self.n += other.n;
        Ok(())
    }

    pub fn product_sum(&self, slot: usize) -> f64 {
        self.product_sums[slot].value()
    }

    pub fn product_sum_sq(&self, slot: usize) -> f64 {
        self.product_sum_sqs[slot].value()
    }

    pub fn rate_sum(&self, slot: usize) -> f64 {
        self.rate_sums[slot].value()
    }

    pub fn negative_count(&self, slot: usize) -> u64 {
        self.negative_counts[slot]
    }

    /// Mean of one product channel.
    pub fn product_mean(&self, slot: usize) -> f64 {
        self.product_sums[slot].value() / self.n as f64
    }

    /// Standard error of one product-channel mean.
    pub fn product_mean_stderr(&self, slot: usize) -> f64 {
        let n = self.n as f64;
        let mean = self.product_mean(slot);
        let var = (self.product_sum_sqs[slot].value() / n - mean * mean).max(0.0);
        (var / n).sqrt()
    }

    /// Mean of one rate channel.
    pub fn rate_mean(&self, slot: usize) -> f64 {
        self.rate_sums[slot].value() / self.n as f64
    }

    fn numerator(&self) -> f64 {
        self.product_sums[PP].value() + self.product_sums[MM].value()
            - self.product_sums[PM].value()
            - self.product_sums[MP].value()
    }

    fn denominator(&self) -> f64 {
        self.product_sums[PP].value()
            + self.product_sums[MM].value()
            + self.product_sums[PM].value()
            + self.product_sums[MP].value()
    }

    /// RMS magnitude of the per-sample products, the natural scale for the
    /// degenerate-denominator guard.
    fn product_scale(&self) -> f64 {
        let total: f64 = (0..4).map(|s| self.product_sum_sqs[s].value()).sum();
        (total / (4.0 * self.n as f64)).sqrt()
    }
}

/// Point estimate of one normalized correlation with its error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub e: f64,
    pub stderr: f64,
    pub n: u64,
}

fn ratio_or_degenerate(num: f64, den: f64, n: u64, scale: f64, epsilon: f64) -> Result<f64> {
    let threshold = epsilon * n as f64 * scale;
    if den.abs() <= threshold {
        return Err(Error::DegenerateDenominator {
            denominator: den,
            threshold,
            epsilon,
        });
    }
    Ok(num / den)
}

/// Correlation E from per-chunk accumulators, with a jackknife-over-chunks
/// standard error.
pub fn correlation_from_chunks(
    chunks: &[JointMomentAccumulator],
    epsilon: f64,
) -> Result<CorrelationEstimate> {
    if chunks.len() < 2 {
        return Err(Error::InvalidEstimator(
            "correlation error bars need at least 2 chunks",
        ));
    }
    let mut total = JointMomentAccumulator::new(chunks[0].representation());
    for chunk in chunks {
        total.merge(chunk)?;
    }
    if total.n < 2 {
        return Err(Error::InvalidEstimator(
            "correlation needs at least 2 samples",
        ));
    }
    let scale = total.product_scale();
    let e = ratio_or_degenerate(
        total.numerator(),
        total.denominator(),
        total.n,
        scale,
        epsilon,
    )?;

    let num_total = total.numerator();
    let den_total = total.denominator();
    let k = chunks.len();
    let mut leave_one_out = Vec::with_capacity(k);
    for chunk in chunks {
        let num = num_total - chunk.numerator();
        let den = den_total - chunk.denominator();
        let n = total.n - chunk.n;
        leave_one_out.push(ratio_or_degenerate(num, den, n, scale, epsilon)?);
    }
    let mean: f64 = leave_one_out.iter().sum::<f64>() / k as f64;
    let ss: f64 = leave_one_out.iter().map(|v| (v - mean) * (v - mean)).sum();
    let stderr = ((k - 1) as f64 / k as f64 * ss).sqrt();

    Ok(CorrelationEstimate {
        e,
        stderr,
        n: total.n,
    })
}

/// Sampling plan shared by the estimator entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Samples per angle pair.
    pub samples: u64,
    /// Number of chunks; also the number of substreams per angle pair.
    pub chunks: u32,
    /// Relative epsilon for the degenerate-denominator guard; the absolute
    /// threshold is epsilon · n · (rms product magnitude).
    pub epsilon: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            chunks: 64,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.chunks < 2 {
            return Err(Error::InvalidEstimator("need at least 2 chunks"));
        }
        if self.samples < self.chunks as u64 {
            return Err(Error::InvalidEstimator("need samples >= chunks"));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::InvalidEstimator("epsilon must be finite and >= 0"));
        }
        Ok(())
    }

    /// Chunk sizes in chunk order; sizes differ by at most one sample.
    fn chunk_sizes(&self) -> Vec<u64> {
        let k = self.chunks as u64;
        let base = self.samples / k;
        let remainder = self.samples % k;
        (0..k).map(|c| base + u64::from(c < remainder)).collect()
    }
}

/// One accumulator per chunk for a single angle pair. Chunk `c` draws from
/// `stream.substream(c)`; chunks run in parallel but the returned order is
/// always chunk order.
pub fn accumulate_chunks(
    model: &CovarianceModel,
    settings: &AnalyzerSettings,
    representation: Representation,
    run: &RunConfig,
    stream: RandomStream,
) -> Result<Vec<JointMomentAccumulator>> {
    run.validate()?;
    if !settings.is_finite() {
        return Err(Error::NonFiniteInput {
            what: "analyzer angle",
        });
    }
    let sizes = run.chunk_sizes();
    let chunks: Vec<JointMomentAccumulator> = sizes
        .par_iter()
        .enumerate()
        .map(|(c, &size)| {
            let mut sampler = model.sampler(stream.substream(c as u64));
            let mut acc = JointMomentAccumulator::new(representation);
            for _ in 0..size {
                let sample = sampler.next_sample();
                let rates = rates_for(representation, &sample, settings);
                acc.push(&rates).expect("representation fixed per chunk");
            }
            acc
        })
        .collect();
    Ok(chunks)
}

/// Estimate E for one angle pair.
pub fn estimate_correlation(
    model: &CovarianceModel,
    settings: &AnalyzerSettings,
    representation: Representation,
    run: &RunConfig,
    stream: RandomStream,
) -> Result<CorrelationEstimate> {
    let chunks = accumulate_chunks(model, settings, representation, run, stream)?;
    correlation_from_chunks(&chunks, run.epsilon)
}

/// Full CHSH estimate over one angle set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellEstimate {
    /// E(a,b), E(a,b′), E(a′,b), E(a′,b′).
    pub e_values: [f64; 4],
    pub e_stderrs: [f64; 4],
    pub s_value: f64,
    pub s_stderr: f64,
    pub n_per_pair: u64,
    pub representation: Representation,
}

/// CHSH estimate from count rates: four independent angle-pair runs on the
/// substream ranges `[p·chunks, (p+1)·chunks)` for pair index p in CHSH
/// order.
pub fn bell_estimate(
    model: &CovarianceModel,
    angles: &BellAngles,
    representation: Representation,
    run: &RunConfig,
    stream: RandomStream,
) -> Result<BellEstimate> {
    if !angles.is_finite() {
        return Err(Error::NonFiniteInput {
            what: "analyzer angle",
        });
    }
    let mut e_values = [0.0; 4];
    let mut e_stderrs = [0.0; 4];
    let mut n_per_pair = 0;
    for (pair, (theta_a, theta_b)) in angles.pairs().into_iter().enumerate() {
        let settings = AnalyzerSettings::new(theta_a, theta_b);
        let pair_stream = stream.substream(pair as u64 * run.chunks as u64);
        let est = estimate_correlation(model, &settings, representation, run, pair_stream)?;
        e_values[pair] = est.e;
        e_stderrs[pair] = est.stderr;
        n_per_pair = est.n;
    }
    let s_value = e_values[0] - e_values[1] + e_values[2] + e_values[3];
    let s_stderr = e_stderrs.iter().map(|s| s * s).sum::<f64>().sqrt();
    Ok(BellEstimate {
        e_values,
        e_stderrs,
        s_value,
        s_stderr,
        n_per_pair,
        representation,
    })
}

/// Empirical negative-value fraction of one rate channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeFraction {
    pub fraction: f64,
    pub stderr: f64,
    pub negatives: u64,
    pub n: u64,
}

/// Negative-value fractions for all four rate channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport {
    pub representation: Representation,
    /// Indexed like [`RATE_LABELS`].
    pub fractions: [NegativeFraction; 4],
    pub n: u64,
}

/// Negative-rate fractions from already-accumulated chunks.
pub fn positivity_from_chunks(chunks: &[JointMomentAccumulator]) -> Result<PositivityReport> {
    let Some(first) = chunks.first() else {
        return Err(Error::InvalidEstimator("positivity needs at least 1 chunk"));
    };
    let mut total = JointMomentAccumulator::new(first.representation());
    for chunk in chunks {
        total.merge(chunk)?;
    }
    if total.n == 0 {
        return Err(Error::InvalidEstimator("positivity needs at least 1 sample"));
    }
    let n = total.n;
    let nf = n as f64;
    let fractions = std::array::from_fn(|slot| {
        let negatives = total.negative_count(slot);
        let fraction = negatives as f64 / nf;
        NegativeFraction {
            fraction,
            stderr: (fraction * (1.0 - fraction) / nf).sqrt(),
            negatives,
            n,
        }
    });
    Ok(PositivityReport {
        representation: total.representation(),
        fractions,
        n,
    })
}

/// Fraction of samples with each count rate below zero, with binomial
/// standard errors. The rate distributions do not depend on the analyzer
/// angles, but the settings are taken explicitly to keep the pipeline
/// uniform.
pub fn positivity_report(
    model: &CovarianceModel,
    settings: &AnalyzerSettings,
    representation: Representation,
    run: &RunConfig,
    stream: RandomStream,
) -> Result<PositivityReport> {
    let chunks = accumulate_chunks(model, settings, representation, run, stream)?;
    positivity_from_chunks(&chunks)
}

/// One row of a squeeze-strength sweep.
#[derive(Debug)]
pub struct SweepPoint {
    pub chi: f64,
    pub bell: Result<BellEstimate>,
    pub positivity: Result<PositivityReport>,
}

/// Independent, reproducible rows over a χ grid. Row `r` uses the
/// substream range `[r·5·chunks, (r+1)·5·chunks)`: four pair ranges
/// followed by one positivity range. Per-row failures are recorded in the
/// row and the sweep continues.
pub fn sweep_chi(
    grid: &[f64],
    angles: &BellAngles,
    representation: Representation,
    run: &RunConfig,
    stream: RandomStream,
) -> Vec<SweepPoint> {
    grid.iter()
        .enumerate()
        .map(|(row, &chi)| {
            let row_stream = stream.substream(row as u64 * 5 * run.chunks as u64);
            match CovarianceModel::for_chi(chi) {
                Ok(model) => {
                    let bell = bell_estimate(&model, angles, representation, run, row_stream);
                    let positivity = positivity_report(
                        &model,
                        &AnalyzerSettings::new(angles.theta_a, angles.theta_b),
                        representation,
                        run,
                        row_stream.substream(4 * run.chunks as u64),
                    );
                    SweepPoint {
                        chi,
                        bell,
                        positivity,
                    }
                }
                Err(err) => SweepPoint {
                    chi,
                    bell: Err(err),
                    positivity: Err(Error::InvalidSqueeze(chi)),
                },
            }
        })
        .collect()
}

/// CHSH estimate for the ±1 sign observables read directly off the hidden
/// variables. These genuine two-valued local observables must respect
/// |S| ≤ 2; they are the control that locates the pseudo-violation in the
/// count-rate postprocessing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignBellEstimate {
    pub e_values: [f64; 4],
    pub e_stderrs: [f64; 4],
    pub s_value: f64,
    pub s_stderr: f64,
    pub n_per_pair: u64,
}

pub fn sign_bell_estimate(
    model: &CovarianceModel,
    angles: &BellAngles,
    run: &RunConfig,
    stream: RandomStream,
) -> Result<SignBellEstimate> {
    run.validate()?;
    if !angles.is_finite() {
        return Err(Error::NonFiniteInput {
            what: "analyzer angle",
        });
    }
    let sizes = run.chunk_sizes();
    let mut e_values = [0.0; 4];
    let mut e_stderrs = [0.0; 4];
    let mut n_per_pair = 0;
    for (pair, (theta_a, theta_b)) in angles.pairs().into_iter().enumerate() {
        let settings = AnalyzerSettings::new(theta_a, theta_b);
        let pair_stream = stream.substream(pair as u64 * run.chunks as u64);
        let chunk_stats: Vec<(f64, u64)> = sizes
            .par_iter()
            .enumerate()
            .map(|(c, &size)| {
                let mut sampler = model.sampler(pair_stream.substream(c as u64));
                let mut sum = CompensatedSum::default();
                for _ in 0..size {
                    let sample = sampler.next_sample();
                    let (a, b) = sign_observables(&sample, &settings);
                    sum.add(a * b);
                }
                (sum.value(), size)
            })
            .collect();

        let total_sum: f64 = chunk_stats.iter().map(|(s, _)| s).sum();
        let total_n: u64 = chunk_stats.iter().map(|(_, n)| n).sum();
        let e = total_sum / total_n as f64;
        let k = chunk_stats.len();
        let loo: Vec<f64> = chunk_stats
            .iter()
            .map(|(s, n)| (total_sum - s) / (total_n - n) as f64)
            .collect();
        let loo_mean = loo.iter().sum::<f64>() / k as f64;
        let ss: f64 = loo.iter().map(|v| (v - loo_mean) * (v - loo_mean)).sum();
        e_values[pair] = e;
        e_stderrs[pair] = ((k - 1) as f64 / k as f64 * ss).sqrt();
        n_per_pair = total_n;
    }
    let s_value = e_values[0] - e_values[1] + e_values[2] + e_values[3];
    let s_stderr = e_stderrs.iter().map(|s| s * s).sum::<f64>().sqrt();
    Ok(SignBellEstimate {
        e_values,
        e_stderrs,
        s_value,
        s_stderr,
        n_per_pair,
    })
}
