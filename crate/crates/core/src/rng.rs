//! Seeded random streams.
//!
//! Every stochastic routine draws from a ChaCha8 stream keyed by
//! `seed + trial`, so per-trial results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The random stream used by trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial))
}
