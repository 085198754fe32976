//! Seeded pseudo-random numbers with bit-identical output on every platform.
//!
//! The generator is xoshiro256** seeded through splitmix64. Gaussian
//! variates use the Box-Muller transform; the second variate of each pair is
//! cached.

use rand_core::{Rng as _, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256StarStar};

/// splitmix64 step. Also used as the 64-bit mixing function for trial seeds.
pub fn splitmix64(state: &mut u64) -> u64 {
    let out = SplitMix64::seed_from_u64(*state).next_u64();
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    out
}

/// Combines a base seed with a list of indices into a new seed.
///
/// Each word is folded in with a splitmix64 round, so `(1, 2)` and `(2, 1)`
/// give unrelated results.
pub fn mix_seed(base: u64, words: &[u64]) -> u64 {
    let mut state = base;
    let mut out = splitmix64(&mut state);
    for &w in words {
        state ^= w.wrapping_mul(0xD605_BBB5_8C8A_BBB3) ^ out;
        out = splitmix64(&mut state);
    }
    out
}

#[derive(Debug, Clone)]
pub struct Rng {
    inner: Xoshiro256StarStar,
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[low, high)`.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_f64()
    }

    /// Standard normal variate via Box-Muller.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * theta.sin());
        radius * theta.cos()
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.standard_normal()
    }
}
