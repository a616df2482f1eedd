//! Haar-uniform pure states in a degenerate subspace and the statistics of
//! their entanglement.
//!
//! A Haar-uniform state is an i.i.d. standard complex Gaussian vector,
//! normalized; the distribution is invariant under any fixed unitary. For
//! the four-dimensional first excited subspace the entanglement of a sample
//! is [`super::epsilon_gen_ent`], bounded by 1/3.
//!
//! Sampling is split over a fixed number of counter-based RNG streams
//! ([`HAAR_STREAMS`]) regardless of how many worker threads consume them, so
//! the result is a pure function of `(seed, samples)`: chunk statistics are
//! merged in stream order, byte-for-byte reproducible at any parallelism.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::perturb::epsilon_gen_ent;

/// Number of independent RNG streams the sample range is split over.
pub const HAAR_STREAMS: u64 = 256;

/// Smallest sample count accepted by [`entanglement_distribution`].
pub const MIN_SAMPLES: u64 = 100_000;

const TWO_POW_NEG53: f64 = 1.0 / 9_007_199_254_740_992.0;

/// Uniform in (0, 1]: never zero, safe under the logarithm.
fn uniform_open01<R: RngCore>(rng: &mut R) -> f64 {
    (((rng.next_u64() >> 11) + 1) as f64) * TWO_POW_NEG53
}

/// Uniform in [0, 1).
fn uniform_halfopen01<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64) * TWO_POW_NEG53
}

/// One Box-Muller pair of independent standard normals.
fn gaussian_pair<R: RngCore>(rng: &mut R) -> (f64, f64) {
    let r = libm::sqrt(-2.0 * libm::log(uniform_open01(rng)));
    let phi = 2.0 * core::f64::consts::PI * uniform_halfopen01(rng);
    (r * libm::cos(phi), r * libm::sin(phi))
}

/// A Haar-uniform normalized state of the given dimension: i.i.d. standard
/// complex Gaussian components, normalized. Invariant in distribution under
/// every fixed unitary.
pub fn haar_sample<R: RngCore>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    debug_assert!(dim >= 1);
    let mut c = Vec::with_capacity(dim);
    let mut norm_sq = 0.0;
    for _ in 0..dim {
        let (re, im) = gaussian_pair(rng);
        norm_sq += re * re + im * im;
        c.push(Complex64::new(re, im));
    }
    let inv = 1.0 / libm::sqrt(norm_sq);
    for x in &mut c {
        *x *= inv;
    }
    c
}

/// Statistics of one RNG stream's share of the samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChunkStats {
    /// Counts in the ranges (0, 1/9], (1/9, 2/9], (2/9, 1/3].
    pub counts: [u64; 3],
    pub sum: f64,
    pub max: f64,
}

/// Accumulated distribution over all streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarStats {
    pub samples: u64,
    /// Counts in the ranges (0, 1/9], (1/9, 2/9], (2/9, 1/3].
    pub bin_counts: [u64; 3],
    pub mean: f64,
    pub max: f64,
}

impl HaarStats {
    pub fn bin_fractions(&self) -> [f64; 3] {
        let n = self.samples as f64;
        [
            self.bin_counts[0] as f64 / n,
            self.bin_counts[1] as f64 / n,
            self.bin_counts[2] as f64 / n,
        ]
    }
}

/// Number of samples assigned to a stream: the total split as evenly as the
/// stream count allows, leading streams taking the remainder.
pub fn chunk_len(samples: u64, chunk: u64) -> u64 {
    debug_assert!(chunk < HAAR_STREAMS);
    samples / HAAR_STREAMS + u64::from(chunk < samples % HAAR_STREAMS)
}

/// Draws one stream's share of dimension-4 Haar samples and bins their
/// entanglement. Deterministic in `(seed, chunk, len)`.
pub fn sample_chunk(seed: u64, chunk: u64, len: u64) -> ChunkStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut stats = ChunkStats::default();
    for _ in 0..len {
        let c = haar_sample(4, &mut rng);
        let eps = epsilon_gen_ent(&[c[0], c[1], c[2], c[3]]).expect("normalized by construction");
        stats.sum += eps;
        if eps > stats.max {
            stats.max = eps;
        }
        if eps > 0.0 {
            if eps <= 1.0 / 9.0 {
                stats.counts[0] += 1;
            } else if eps <= 2.0 / 9.0 {
                stats.counts[1] += 1;
            } else {
                stats.counts[2] += 1;
            }
        }
    }
    stats
}

/// Merges per-stream statistics in stream order.
pub fn merge_chunks(samples: u64, chunks: &[ChunkStats]) -> HaarStats {
    let mut bin_counts = [0u64; 3];
    let mut sum = 0.0;
    let mut max = 0.0;
    for c in chunks {
        for (total, delta) in bin_counts.iter_mut().zip(&c.counts) {
            *total += delta;
        }
        sum += c.sum;
        if c.max > max {
            max = c.max;
        }
    }
    HaarStats {
        samples,
        bin_counts,
        mean: sum / samples as f64,
        max,
    }
}

/// Entanglement distribution of Haar-uniform states in the four-dimensional
/// degenerate subspace: bin fractions over (0, 1/9], (1/9, 2/9], (2/9, 1/3],
/// the mean, and the observed maximum.
///
/// Bit-for-bit reproducible for a given `(seed, samples)` pair at any worker
/// count, because the stream split is fixed.
pub fn entanglement_distribution(samples: u64, seed: u64) -> Result<HaarStats> {
    if samples < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_SAMPLES} samples for stable statistics, got {samples}"
        )));
    }
    let chunks: Vec<ChunkStats> = (0..HAAR_STREAMS)
        .map(|c| sample_chunk(seed, c, chunk_len(samples, c)))
        .collect();
    Ok(merge_chunks(samples, &chunks))
}
