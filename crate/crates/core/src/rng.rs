//! Seed-stream derivation.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by
//! `(seed, role)`.  Trial seeds are in turn mixed from a master seed and a
//! list of tags (suite, n, epsilon, trial index), so trials are independent
//! of execution order and safe to run in parallel.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a tag list.
pub fn mix_seed(master: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix64(master ^ 0x243f_6a88_85a3_08d3);
    for &t in tags {
        s = splitmix64(s ^ splitmix64(t));
    }
    s
}

/// A ChaCha8 generator on the stream `role` of `seed`.
pub fn rng_for(seed: u64, role: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(role);
    rng
}
