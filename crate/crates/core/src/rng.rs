//! Deterministic stream splitting.
//!
//! Every random draw in the crate comes from a stream keyed by a master seed
//! and a path of integers (domain tag, replicate index, site index, ...).
//! Streams are independent of evaluation order, so parallel and serial runs
//! produce identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags that keep sibling streams apart.
pub mod tag {
    pub const SITE: u64 = 0x5349_5445;
    pub const REPLICATE: u64 = 0x5245_504c;
    pub const BOOTSTRAP: u64 = 0x424f_4f54;
    pub const VALIDATION: u64 = 0x5641_4c49;
    pub const NICHES: u64 = 0x4e49_4348;
    pub const CELL: u64 = 0x4345_4c4c;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `path` into `master` to obtain a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| {
            splitmix64(acc.rotate_left(23) ^ splitmix64(p))
        })
}

pub fn stream(master: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, path))
}
