//! Deterministic seed derivation.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by a seed
//! derived from a master seed and a (stream, index) pair, so Monte-Carlo work
//! gives the same answer whether it runs on one thread or many.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream labels separating independent uses of one master seed.
pub mod stream {
    pub const CHANNEL: u64 = 1;
    pub const MESSAGE_PICK: u64 = 2;
    pub const CORRUPTION: u64 = 3;
    pub const PADDING: u64 = 4;
    pub const PURPOSE: u64 = 5;
    pub const PROFILE: u64 = 6;
    pub const SWEEP: u64 = 7;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ index)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    rng(derive(seed, stream, index))
}
