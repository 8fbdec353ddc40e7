//! Counter-based random streams.
//!
//! Every stream is a ChaCha8 keystream whose 256-bit key is the packed
//! `(seed, machine, round, k)` tuple, so the map from keys to streams is
//! injective and draws never depend on the order in which keys are visited.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngKey {
    pub seed: u64,
    pub machine: u64,
    pub round: u64,
    pub k: u64,
}

impl RngKey {
    pub fn new(seed: u64, machine: u64, round: u64, k: u64) -> Self {
        RngKey {
            seed,
            machine,
            round,
            k,
        }
    }

    /// Key for the `k`th query of `machine` in `round` of a run seeded by `seed`.
    pub fn query(seed: u64, machine: usize, round: usize, k: usize) -> Self {
        Self::new(seed, machine as u64, round as u64, k as u64)
    }

    fn to_bytes(self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for (chunk, word) in
            out.chunks_exact_mut(8)
                .zip([self.seed, self.machine, self.round, self.k])
        {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        out
    }
}

/// A deterministic stream of uniform, Gaussian and categorical draws.
#[derive(Clone, Debug)]
pub struct Stream {
    rng: ChaCha8Rng,
}

pub fn derive_stream(key: RngKey) -> Stream {
    Stream {
        rng: ChaCha8Rng::from_seed(key.to_bytes()),
    }
}

impl Stream {
    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn gaussian_vec(&mut self, n: usize, std: f64) -> Vec<f64> {
        (0..n).map(|_| std * self.gaussian()).collect()
    }

    /// Index drawn with probability proportional to `weights`.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let u = self.uniform() * total;
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding gap at the top end
        weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}
