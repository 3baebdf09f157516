//! Deterministic random numbers for the synthetic task generator.
//!
//! The generator is SplitMix64: 64-bit counter state advanced by the golden
//! gamma 0x9E3779B97F4A7C15, output scrambled by the standard two-round
//! finalizer. It is named and fixed by algorithm so that any implementation
//! of this toolkit reproduces byte-identical synthetic datasets from the
//! same seed. Streams derive their starting state by finalizing
//! `seed XOR finalize(STREAM_SALT XOR id)`, which places distinct ids at
//! unrelated points of the counter orbit.
//!
//! Normal deviates come from the Box-Muller transform applied to pairs of
//! uniform draws; the second deviate of each pair is cached, so draw order
//! is part of the determinism contract.

use crate::math;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xA076_1D64_78BD_642F;

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 with a cached Box-Muller spare.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare: Option<f64>,
}

impl SplitMix64 {
    /// Stream 0 for `seed`.
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    /// Independent stream `id` for `seed`; use distinct ids for parallel generation.
    pub fn stream(seed: u64, id: u64) -> Self {
        SplitMix64 {
            state: finalize(seed ^ finalize(STREAM_SALT ^ id)),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        finalize(self.state)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased-enough index in [0, n) via 128-bit multiply-shift.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Standard normal deviate (Box-Muller; consumes two uniforms per pair).
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0,1] keeps the log finite
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = math::sqrt(-2.0 * math::ln(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        self.spare = Some(r * math::sin(theta));
        r * math::cos(theta)
    }
}
