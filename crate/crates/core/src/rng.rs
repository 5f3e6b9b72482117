//! Seeded random streams.
//!
//! Streams are ChaCha8 keyed by `seed` (expanded through
//! `SeedableRng::seed_from_u64`) with the stream id selecting an independent
//! keystream. Floats take the top 53 bits of a `u64`; bounded integers use a
//! 128-bit multiply-shift. No other sampling code is involved, so a
//! `(seed, stream)` pair denotes the same sequence on every platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Stream(ChaCha8Rng);

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Stream(rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `0..n`; `n` must be nonzero.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Continuous power law above `xmin` by inverse CDF.
    pub fn power_law(&mut self, xmin: f64, alpha: f64) -> f64 {
        xmin * (1.0 - self.uniform()).powf(-1.0 / (alpha - 1.0))
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        -(1.0 - self.uniform()).ln() / rate
    }
}
