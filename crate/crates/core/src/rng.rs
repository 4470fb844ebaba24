//! Deterministic stream-splittable randomness.
//!
//! Every sampling routine in the crate draws from a ChaCha8 generator keyed
//! by a single `u64` seed. Independent streams for parallel work are derived
//! with [`derive_seed`], so results are a pure function of the master seed
//! and the (sweep, trial) indices, regardless of thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Builds the generator used by all samplers for a given seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a child seed for the work item `salt` under `master`.
///
/// SplitMix64 finalizer over `master ^ (salt + 1) * phi64`; child seeds for
/// distinct salts are decorrelated, and the map is fixed for reproducibility.
pub fn derive_seed(master: u64, salt: u64) -> u64 {
    const PHI64: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut z = master ^ (salt.wrapping_add(1)).wrapping_mul(PHI64);
    z = z.wrapping_add(PHI64);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Salt for trial `trial` of sweep step `step`, keeping streams disjoint
/// across the (step, trial) grid.
pub fn trial_salt(step: usize, trial: usize) -> u64 {
    ((step as u64) << 32) | (trial as u64 & 0xffff_ffff)
}
