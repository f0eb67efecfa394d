//! Seeded, splittable randomness.
//!
//! Every stochastic operation takes its generator as a parameter. Independent
//! roles in a session (verifier coins, prover coins, the sampler for D) get
//! separate ChaCha20 streams of one seed so that changing how many draws one
//! role makes never shifts another role's sequence.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

/// Stream ids used by the session runners.
pub mod streams {
    pub const VERIFIER: u64 = 1;
    pub const PROVER: u64 = 2;
    pub const SAMPLER: u64 = 3;
    pub const WORKLOAD: u64 = 4;
    pub const EXTRACTOR: u64 = 5;
}

pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for the `index`-th child of `seed`, e.g. one trial of a run.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}
