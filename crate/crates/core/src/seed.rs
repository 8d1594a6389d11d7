//! Seed derivation.
//!
//! Every random choice in the crate is driven by a `ChaCha8Rng` seeded from a
//! 64-bit value. Child seeds are derived from a parent seed, a stream label
//! and an index by folding them through SplitMix64, so any trial, cell or
//! stage can be replayed from `(base seed, label, index)` alone:
//!
//! ```text
//! derive(seed, label, index) = mix(mix(seed ^ fnv1a(label)) ^ index)
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn derive(seed: u64, label: &str, index: u64) -> u64 {
    mix(mix(seed ^ fnv1a(label)) ^ index)
}

/// Seed for trial `trial` of grid cell `cell`.
pub fn trial_seed(base: u64, cell: u64, trial: u64) -> u64 {
    derive(derive(base, "cell", cell), "trial", trial)
}
