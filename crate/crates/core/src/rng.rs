//! Seeded, platform-independent randomness.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ChaCha8 stream seeded from a 64-bit value. The same seed yields the same
/// sequence on every platform.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for one sentence of a run: seed `run_seed + ordinal`.
    pub fn for_item(run_seed: u64, ordinal: usize) -> Self {
        RngState::new(run_seed.wrapping_add(ordinal as u64))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform integer in `0..bound`. Panics if `bound == 0`.
    pub fn below(&mut self, bound: usize) -> usize {
        self.inner.random_range(0..bound)
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}
