//! Seeding contract.
//!
//! Every random stream is a `ChaCha8Rng` (crate `rand_chacha` 0.3) seeded via
//! `SeedableRng::seed_from_u64`. Child streams (restarts, trials, sample
//! chunks) use [`mix`], a SplitMix64 finalizer applied to
//! `seed + GOLDEN * (index + 1)` with wrapping arithmetic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child stream `index` from `seed`.
pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
