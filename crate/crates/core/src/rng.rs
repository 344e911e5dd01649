//! Seeded random streams.
//!
//! All randomness flows from a `u64` seed into a ChaCha8 stream. Child seeds
//! (per trial, per sample) are derived with a SplitMix64 finalizer so that
//! trials can run in any order or on any number of workers and still draw
//! identical samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier recorded in every report that consumed randomness.
pub const ALGORITHM_ID: &str = "chacha8+splitmix64/v1";

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `index` under `parent`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}
