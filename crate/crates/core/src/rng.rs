//! Seeded random streams.
//!
//! Every run draws from a single root seed. Components never share a
//! generator; each asks for a named sub-stream so that adding draws in one
//! place cannot shift the sequence seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn label_hash(label: &str) -> u64 {
    label
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Derives a child seed from `seed`, a label and an index.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    splitmix(splitmix(seed ^ label_hash(label)).wrapping_add(splitmix(index)))
}

/// Opens the named sub-stream `label`/`index` of `seed`.
pub fn stream(seed: u64, label: &str, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, label, index))
}
