//! Seeded random streams.
//!
//! Every sampler takes a [`GraphRng`], which is ChaCha8 as implemented by
//! `rand_chacha`. Its output for a given seed is fixed across platforms.
//! Independent streams for chains and replicates are derived from one
//! root seed by hashing a path of integers, so results do not depend on
//! how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type GraphRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSeed {
    /// A seed drawn from operating-system entropy.
    pub fn from_entropy() -> Self {
        RngSeed(rand::random())
    }

    pub fn rng(self) -> GraphRng {
        GraphRng::seed_from_u64(self.0)
    }

    /// Child seed identified by `path`; distinct paths give unrelated streams.
    pub fn derive(self, path: &[u64]) -> RngSeed {
        let mut h = splitmix64(self.0);
        for &p in path {
            h = splitmix64(h ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019)));
        }
        RngSeed(h)
    }

    pub fn derive_rng(self, path: &[u64]) -> GraphRng {
        self.derive(path).rng()
    }
}
