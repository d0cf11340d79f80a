//! Reproducible weighted index sampling.
//!
//! Indices are drawn with probability proportional to a fixed nonnegative
//! weight vector (squared row or column norms in the solvers) by inverse-CDF
//! binary search over cumulative sums: O(N) build, O(log N) per draw, and
//! the cumulative representation makes deterministic replay easy to check.
//!
//! The generator is SplitMix64, spelled out below so that a run is
//! reproducible from its seed by any implementation in any language:
//!
//! * state advances by the constant 0x9E3779B97F4A7C15 per draw;
//! * output is the advanced state mixed by two xor-shift/multiply rounds
//!   with constants 0xBF58476D1CE4E5B9 (shift 30) and 0x94D049BB133111EB
//!   (shift 27), then a final shift by 31;
//! * `uniform` keeps the top 53 bits as a float in [0, 1);
//! * `standard_normal` is Box-Muller, cosine branch only:
//!   sqrt(-2 ln u1) * cos(2 pi u2), with u1 clamped away from zero.
//!
//! One generator instance serves one solver run; the double/triple solvers
//! draw their per-iteration indices from this single stream in a fixed
//! order (y-row, then z-column, then x-row). Trial `t` of an experiment
//! seeds its generator with `base_seed + t`.

use crate::error::Error;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Deterministic 64-bit-state generator (SplitMix64). Single-owner: one per
/// solver run, never shared.
#[derive(Debug, Clone)]
pub struct SeededRng {
    state: u64,
}

impl SeededRng {
    /// Name of the generator algorithm, for cross-implementation replay
    /// checks: two implementations agreeing on this identifier and a seed
    /// must produce the same stream.
    pub const ALGORITHM: &'static str = "splitmix64";

    pub fn new(seed: u64) -> Self {
        SeededRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller (cosine branch). Consumes two
    /// uniforms per value.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform().max(f64::MIN_POSITIVE);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Immutable inverse-CDF sampler over a fixed weight vector. Shareable
/// across threads; all mutability lives in the caller's [`SeededRng`].
#[derive(Debug, Clone)]
pub struct WeightedSampler {
    cumulative: Vec<f64>,
    total: f64,
    last_positive: usize,
}

impl WeightedSampler {
    /// Build from nonnegative weights. P(k) = weights[k] / sum(weights).
    ///
    /// Errors with [`Error::AllWeightsZero`] when the weights sum to zero,
    /// which the solvers surface as a zero-matrix input.
    pub fn from_weights(weights: &[f64]) -> Result<Self, Error> {
        assert!(!weights.is_empty(), "need at least one weight");
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (k, &w) in weights.iter().enumerate() {
            assert!(w >= 0.0, "weights must be nonnegative");
            if w > 0.0 {
                last_positive = k;
            }
            acc += w;
            cumulative.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::AllWeightsZero);
        }
        Ok(WeightedSampler {
            cumulative,
            total: acc,
            last_positive,
        })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Exact selection probability of index `k`.
    pub fn probability(&self, k: usize) -> f64 {
        let lo = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        (self.cumulative[k] - lo) / self.total
    }

    /// Draw one index. Zero-weight indices are never returned: the search
    /// lands on the first index whose cumulative weight strictly exceeds
    /// the draw, and equal neighbors (zero weight) are skipped over.
    pub fn sample(&self, rng: &mut SeededRng) -> usize {
        let u = rng.uniform() * self.total;
        let k = self.cumulative.partition_point(|&cw| cw <= u);
        // u * total can round up to exactly total; clamp onto the last
        // index that carries mass.
        if k >= self.cumulative.len() {
            self.last_positive
        } else {
            k
        }
    }
}
