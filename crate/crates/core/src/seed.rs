//! Stable seed derivation and Gaussian sampling.
//!
//! Every random stream is a `ChaCha8Rng` seeded through `seed_from_u64`
//! with a key obtained by folding integers through the SplitMix64 finalizer.
//! Gaussian deviates use the cosine branch of Box-Muller, one deviate per
//! pair of uniforms, so streams are reproducible across platforms.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const FOLD_INIT: u64 = 0x243F_6A88_85A3_08D3;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of integers into one 64-bit seed:
/// `h = FOLD_INIT; for p in parts { h = splitmix64(h ^ splitmix64(p)) }`.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(FOLD_INIT, |h, &p| splitmix64(h ^ splitmix64(p)))
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform deviate in [0, 1) with 53 random bits.
#[inline]
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal deviate (Box-Muller, cosine branch).
#[inline]
pub fn gaussian<R: RngCore>(rng: &mut R) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
