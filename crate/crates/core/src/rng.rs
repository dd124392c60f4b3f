//! The engine's single source of randomness.
//!
//! Generator: xoshiro256** whose 256-bit state is filled by four successive
//! SplitMix64 outputs of the 64-bit seed. Derived draws are defined here, not
//! delegated to a distribution library, so that traces stay portable:
//!
//! * [`SimRng::below`] maps one `u64` to `[0, n)` as `(x * n) >> 64`.
//! * [`SimRng::unit_f64`] uses the top 53 bits: `(x >> 11) * 2^-53`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

/// Name recorded in scenario and trace headers.
pub const PRNG_NAME: &str = "xoshiro256**/splitmix64";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimRng(Xoshiro256StarStar);

impl SimRng {
    pub fn from_seed(seed: u64) -> Self {
        Self(Xoshiro256StarStar::seed_from_u64(seed))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `[0, n)`. `n` must be non-zero.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Uniform float in `[0, 1)`.
    #[inline]
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// An independent stream: a copy of this generator advanced by 2^128 draws.
    /// `self` is left untouched.
    pub fn split(&self) -> SimRng {
        let mut other = self.0.clone();
        other.jump();
        SimRng(other)
    }
}
