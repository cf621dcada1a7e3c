//! Seeded selection primitives.
//!
//! The generator is ChaCha with 8 rounds, keyed by the 64-bit seed in
//! little-endian order followed by 24 zero bytes, stream 0. Bounded draws use
//! rejection sampling on full 64-bit outputs: with `t = (2^64 - n) mod n`,
//! outputs below `t` are discarded and `x mod n` is returned otherwise.
//! Subsets are drawn with a partial Fisher–Yates shuffle over `0..n`, so a
//! selection is fully determined by (seed, n, k) and reproducible from any
//! language with a ChaCha8 implementation.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct ShotRng {
    inner: ChaCha8Rng,
}

impl ShotRng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        ShotRng {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// Draws `k` distinct indices from `0..n` in selection order.
    /// `k` is clamped to `n`.
    pub fn choose_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let k = k.min(n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx
    }

    /// Draws up to `k` items from `items` without replacement, in selection order.
    pub fn choose<'a, T>(&mut self, items: &'a [T], k: usize) -> Vec<&'a T> {
        self.choose_indices(items.len(), k)
            .into_iter()
            .map(|i| &items[i])
            .collect()
    }
}
