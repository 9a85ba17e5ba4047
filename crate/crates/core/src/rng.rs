//! Seeding helpers shared by initialisation, generators and sweeps.

use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of run `run` in sweep cell `cell`, derived from the base seed.
pub fn derive_seed(base: u64, cell: u64, run: u64) -> u64 {
    mix(mix(base ^ mix(cell)) ^ run)
}

/// `count` distinct indices in `0..n`, uniformly chosen.
pub fn distinct_indices(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = seeded(seed);
    rand::seq::index::sample(&mut rng, n, count).into_vec()
}
