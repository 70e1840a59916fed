//! Streaming statistics and seeded RNG streams for Monte-Carlo reductions.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Welford running mean/variance, mergeable across parallel workers.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise merge; exact for disjoint streams.
    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Self { n, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n as f64 - 1.0)
    }

    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Monte-Carlo scalar estimate: mean, standard error, sample count and the
/// master seed that reproduces it.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct EnsembleEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl EnsembleEstimate {
    pub fn from_stats(stats: RunningStats, seed: u64) -> Self {
        Self {
            mean: stats.mean(),
            stderr: stats.stderr(),
            samples: stats.count(),
            seed,
        }
    }

    /// z-score of the estimate against a reference value.
    pub fn z_score(&self, reference: f64) -> f64 {
        if self.stderr == 0.0 {
            if (self.mean - reference).abs() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - reference) / self.stderr
        }
    }
}

/// Counter-based RNG stream: one master seed, independent streams per worker
/// or per model family.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}
