//! Deterministic random streams.
//!
//! Every trajectory owns a [`RngStream`] identified by `(seed, stream)`.
//! The generator is ChaCha8 keyed by the seed with the stream id selecting
//! one of its 2⁶⁴ independent counter streams, so a trajectory's draws never
//! depend on which worker thread produced it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Generator type handed to every sampler.
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Stream for trajectory `index` of a named stage. Stages get unrelated
    /// keys so that e.g. a pre-limit ensemble and a limit ensemble built from
    /// the same user seed do not share draws.
    pub fn for_stage(seed: u64, stage: &str, index: u64) -> Self {
        Self {
            seed: stage_key(seed, stage),
            stream: index,
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Mixes a stage label into a seed (FNV-1a over the label, then splitmix64).
pub fn stage_key(seed: u64, stage: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stage.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(seed ^ h)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw on the half-open interval (0, 1].
#[inline]
pub(crate) fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
