//! Seed derivation. Every stochastic stage draws from its own stream so that
//! results never depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags for the stochastic stages of an experiment run.
pub mod stream {
    pub const AUGMENT: u64 = 0xa0;
    pub const NOISE: u64 = 0xb0;
    pub const MODEL: u64 = 0xc0;
}

/// SplitMix64 finalizer over `base ^ golden * (tag + 1)`.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut z = base ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(tag.wrapping_add(1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
