//! Seed derivation utilities.
//!
//! All randomized routines in this crate draw from `ChaCha8Rng`, a portable
//! counter-based generator, seeded through the helpers below so that a run is
//! reproducible bit-for-bit from a single master seed regardless of platform
//! or evaluation order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step. Stable, endianness-free mixing function.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold a sequence of words into one seed. Used to derive independent
/// sub-seeds (per fold, per repeat, per grid point) from a master seed.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut state = 0x5851_F42D_4C95_7F2D;
    let mut acc = 0u64;
    for &p in parts {
        state ^= p;
        acc ^= splitmix64(&mut state);
    }
    acc
}

/// The crate-wide RNG, constructed from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
