//! Seeds and the 64-bit mixer that every derived random quantity flows through.
//!
//! The mixer is the SplitMix64 finalizer. It is a bijection on `u64` with full
//! avalanche, which makes it suitable both for deriving independent sub-seeds
//! and for the feature-hashing target/sign functions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `value` into the running hash `state`. Order-sensitive.
#[inline]
pub fn combine(state: u64, value: u64) -> u64 {
    mix64(state.wrapping_add(GOLDEN_GAMMA) ^ mix64(value.wrapping_add(GOLDEN_GAMMA)))
}

/// A 64-bit seed. Identical seeds reproduce identical sampling sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Seed(pub u64);

impl Seed {
    pub const fn new(value: u64) -> Self {
        Seed(value)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// Independent sub-seed for stream `stream`. Used to split work across
    /// trials, grid points and minhash indices without shared RNG state.
    #[inline]
    pub fn derive(self, stream: u64) -> Seed {
        Seed(combine(self.0, stream))
    }

    /// A fresh generator positioned at the start of this seed's stream.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}
