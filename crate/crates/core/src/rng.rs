//! Reproducible random streams.
//!
//! Every Monte Carlo consumer draws from a [`RandomStream`]: a ChaCha8
//! counter-based generator keyed by a 64-bit master seed, with the cipher's
//! 64-bit stream id used as the substream index. Identical
//! `(master_seed, substream_index)` pairs replay the identical sequence on
//! any platform and at any worker count; distinct substream indices give
//! statistically independent streams.
//!
//! Gaussian variates are produced by the Box–Muller transform, fixed here
//! once and for all: each pair of standard normals consumes exactly two
//! `u64` draws, so the mapping from stream position to variate is stable.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Handle identifying one reproducible substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    master_seed: u64,
    substream_index: u64,
}

impl RandomStream {
    pub fn new(master_seed: u64, substream_index: u64) -> Self {
        Self {
            master_seed,
            substream_index,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn substream_index(&self) -> u64 {
        self.substream_index
    }

    /// Stream with the same master seed and substream index shifted by
    /// `offset`. Callers lay out disjoint index ranges per task (angle
    /// pair, chunk, sweep row); the layouts are documented at each call
    /// site.
    pub fn substream(&self, offset: u64) -> Self {
        Self {
            master_seed: self.master_seed,
            substream_index: self.substream_index.wrapping_add(offset),
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.substream_index);
        rng
    }
}

/// Standard-normal source over one substream.
pub struct GaussianSource {
    rng: ChaCha8Rng,
}

impl GaussianSource {
    pub fn new(stream: RandomStream) -> Self {
        Self { rng: stream.rng() }
    }

    /// Uniform in (0, 1]: 53 random bits, shifted away from zero so the
    /// logarithm below is always finite.
    #[inline]
    fn unit_open_closed(&mut self) -> f64 {
        (((self.rng.next_u64() >> 11) + 1) as f64) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, 1).
    #[inline]
    fn unit_closed_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64)
    }

    /// One Box–Muller pair of independent standard normals.
    #[inline]
    pub fn next_pair(&mut self) -> (f64, f64) {
        let u1 = self.unit_open_closed();
        let u2 = self.unit_closed_open();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (sin, cos) = (std::f64::consts::TAU * u2).sin_cos();
        (radius * cos, radius * sin)
    }
}
