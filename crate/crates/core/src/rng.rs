//! Pinned random streams.
//!
//! Every random draw in this crate comes from `ChaCha8Rng` (rand_chacha 0.9),
//! keyed with `SeedableRng::seed_from_u64(seed)`. ChaCha is counter based, so
//! independent sub-streams of one seed are selected with `set_stream`, which
//! keeps results identical regardless of how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name and version of the generator, echoed into run manifests.
pub const GENERATOR: &str = "rand_chacha-0.9/ChaCha8Rng";

/// Well-known stream numbers so unrelated consumers of one seed never overlap.
pub mod stream {
    pub const GRAPH: u64 = 0;
    pub const PAIR_SAMPLING: u64 = 1;
    pub const SUBSETS: u64 = 2;
    pub const TRIAL_VECTORS: u64 = 3;
    pub const MONTE_CARLO: u64 = 4;
    pub const GEOMETRY: u64 = 5;
    pub const MATRICES: u64 = 6;
}

/// Generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministically derives a child seed, e.g. one per worker chunk.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the combined words
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
