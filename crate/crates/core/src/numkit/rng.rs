//! Reproducible random streams.
//!
//! A stream is a (seed, stream id) pair over ChaCha12; ChaCha's 64-bit stream
//! selector gives every random shift and every replication its own sequence
//! without coordinating state between threads.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Derives a stream id from structured keys, e.g. `(cell, shift)`.
    pub fn keyed(seed: u64, keys: &[u64]) -> Self {
        let id = keys
            .iter()
            .fold(0x9e37_79b9_7f4a_7c15_u64, |acc, &k| splitmix(acc ^ splitmix(k)));
        Self::new(seed, id)
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw from the open interval (0, 1).
#[inline]
pub fn open01(rng: &mut impl Rng) -> f64 {
    rng.sample(Open01)
}
