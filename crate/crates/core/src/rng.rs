//! Seeded randomness.
//!
//! Every random draw in the crate goes through [`SeededRng`], a ChaCha8 stream
//! keyed by a 64-bit seed. ChaCha output is specified bit-for-bit, and the
//! sampling helpers below only use fixed-width integer ranges, so a seed
//! produces the same trace on every platform (including wasm32).
//!
//! Integer ranges are sampled by `rand`'s widening-multiply method with
//! rejection, which has no modulo bias.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A 64-bit seed. Identical seeds give identical algorithm traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Derives a child seed from this seed and a list of stream indices.
    ///
    /// Used to give every Monte Carlo trial its own stream, so that results do
    /// not depend on the order in which trials are executed.
    pub fn derive(self, indices: &[u64]) -> RngSeed {
        let mut h = splitmix64(self.0 ^ 0x6a09_e667_f3bc_c908);
        for &ix in indices {
            h = splitmix64(h ^ splitmix64(ix.wrapping_add(0xbb67_ae85_84ca_a73b)));
        }
        RngSeed(h)
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: RngSeed) -> Self {
        Self { inner: ChaCha8Rng::seed_from_u64(seed.0) }
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "cannot sample from an empty range");
        self.inner.random_range(0..n as u64) as usize
    }

    /// Uniform integer in the closed range `[lo, hi]`.
    pub fn int_inclusive(&mut self, lo: u32, hi: u32) -> u32 {
        self.inner.random_range(lo..=hi)
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform real in the half-open interval `(0, upper]`.
    pub fn open_closed(&mut self, upper: f64) -> f64 {
        upper * (1.0 - self.unit())
    }

    /// Uniform real in `[lo, hi]`.
    pub fn closed(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Picks an element uniformly from a slice.
    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }

    /// Draws `k` distinct indices from `0..n` (Floyd's algorithm), returned sorted.
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot draw {k} distinct values from {n}");
        let mut picked = std::collections::BTreeSet::new();
        for j in (n - k)..n {
            let t = self.index(j + 1);
            if !picked.insert(t) {
                picked.insert(j);
            }
        }
        picked.into_iter().collect()
    }

    pub(crate) fn inner_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}
