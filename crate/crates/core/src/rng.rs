//! Seeded, portable random streams.
//!
//! Every Monte-Carlo trial draws from its own ChaCha20 stream whose 64-bit
//! seed is derived from `(master_seed, point_index, trial_index)` by chaining
//! the SplitMix64 finalizer:
//!
//! ```text
//! h = mix(master); h = mix(h ^ point); h = mix(h ^ trial)
//! ```
//!
//! The stream of a trial therefore depends only on those three integers and
//! not on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::C64;

/// Generator used for all synthesized data.
pub type StreamRng = ChaCha20Rng;

/// SplitMix64 output function (Steele, Lea & Flood).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the substream belonging to one trial at one sweep point.
pub fn substream_seed(master_seed: u64, point_index: u64, trial_index: u64) -> u64 {
    let h = splitmix64(master_seed);
    let h = splitmix64(h ^ point_index);
    splitmix64(h ^ trial_index)
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Circular complex Gaussian sample with `E|z|^2 = variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * scale, im * scale)
}
