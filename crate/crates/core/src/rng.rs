//! Reproducible random streams.
//!
//! Every stochastic routine takes an explicit generator. Independent streams
//! (one per replication, per training iteration, ...) are derived from a base
//! seed and a list of tags, so results depend only on `(seed, tags)` and not
//! on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Generator for the stream identified by `tags` under `seed`.
pub fn derived(seed: u64, tags: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(seed, tags))
}

/// SplitMix64-style mixing of a seed with a tag path.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix(seed ^ 0x6a09_e667_f3bc_c909);
    for &tag in tags {
        state = splitmix(state ^ splitmix(tag.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    state
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw on the open interval (0, 1).
pub fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
