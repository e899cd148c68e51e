//! Deterministic randomness.
//!
//! Sequential streams use ChaCha8 seeded from a `u64`. Per-edge draws use a
//! SplitMix64 generator whose state is a hash of `(seed, edge nodes)`, so the
//! outcome for an edge never depends on the order in which edges are visited.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::SplitMix64;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines a parent seed with a list of integer keys into a child seed.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(mix64(seed ^ GOLDEN), |h, &k| {
        mix64(h.wrapping_add(GOLDEN) ^ mix64(k))
    })
}

/// Sequential stream for a given seed.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator keyed by `(seed, nodes)`.
#[inline]
pub fn edge_rng(seed: u64, nodes: &[u32]) -> SplitMix64 {
    let mut h = mix64(seed ^ GOLDEN);
    for &v in nodes {
        h = mix64(h.wrapping_add(GOLDEN) ^ u64::from(v));
    }
    SplitMix64::seed_from_u64(h)
}
