//! Seed derivation.
//!
//! Every random choice in a run is keyed by a single master seed. Sub-seeds are
//! derived as `mix(mix(master ^ stream_tag) ^ index)` where `mix` is the
//! SplitMix64 finalizer, so any record or training job can reproduce its own
//! randomness without knowing the order in which other jobs ran.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Independent random streams drawn from one master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedStream {
    Prep,
    ForwardPrep,
    ShotIdeal,
    ShotNoisy,
    Init,
    Shuffle,
    Split,
    Subset,
}

impl SeedStream {
    fn tag(self) -> u64 {
        match self {
            SeedStream::Prep => 0x7072_6570,
            SeedStream::ForwardPrep => 0x6677_6470,
            SeedStream::ShotIdeal => 0x7368_6964,
            SeedStream::ShotNoisy => 0x7368_6e73,
            SeedStream::Init => 0x696e_6974,
            SeedStream::Shuffle => 0x7368_7566,
            SeedStream::Split => 0x7370_6c74,
            SeedStream::Subset => 0x7375_6273,
        }
    }
}

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: SeedStream, index: u64) -> u64 {
    mix64(mix64(master ^ stream.tag()) ^ index)
}

/// Seed for a (state, time point) pair within a stream.
pub fn derive_record_seed(master: u64, stream: SeedStream, state_id: u64, time_index: u64) -> u64 {
    mix64(derive_seed(master, stream, state_id) ^ time_index)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
