//! Seeded generators. Every sampling call takes an explicit `u64` seed.
//!
//! Child seeds are derived with a SplitMix64 finalizer over
//! `master ^ (stream * golden)`, so streams never share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent seed for `stream` from `master`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix(master.wrapping_add(GOLDEN).wrapping_add(mix(stream.wrapping_mul(GOLDEN) ^ 0xD1B5_4A32_D192_ED03)))
}

/// Derive a seed from a path of stream indices.
pub fn derive_path(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(master, |s, &p| derive_seed(s, p))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
