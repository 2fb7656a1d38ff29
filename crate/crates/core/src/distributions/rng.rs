//! Seeded random number generation.
//!
//! Every stochastic routine takes an explicit generator. The generator is
//! ChaCha8, which supports independent streams under one seed, so parallel
//! workers get `stream(seed, worker)` and results do not depend on thread
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `id` under `seed`.
pub fn stream(seed: u64, id: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
