//! Crowd-navigation toolkit: per-pedestrian motion-model and personality
//! estimation from trajectory data, long-horizon path prediction, and
//! socially-aware robot planning that respects per-pedestrian proxemic
//! distances.

pub mod datasets;
pub mod geom;
pub mod navigation;
pub mod personality;
pub mod prediction;
pub mod proxemics;
pub mod rvo;
pub mod estimation;
pub mod synthetic;

pub use datasets::PedId;
pub use geom::Vec2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a hash, used to derive sub-seeds and content-addressed seeds.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h = (h ^ b as u64).wrapping_mul(0x100000001b3);
    }
    h
}

/// Deterministic RNG for one purpose: mixes a textual tag into the master
/// seed so independent pipeline stages never share a stream.
pub fn seeded_rng(seed: u64, tag: &[u8]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(tag))
}

/// Seed derived from a track's content (not its id), so pipelines stay
/// invariant under pedestrian-id relabeling.
pub fn track_seed(master: u64, track: &datasets::Track) -> u64 {
    let mut bytes = Vec::with_capacity(16 + track.positions.len() * 16);
    bytes.extend_from_slice(&track.t0.to_bits().to_le_bytes());
    bytes.extend_from_slice(&track.dt.to_bits().to_le_bytes());
    for p in &track.positions {
        bytes.extend_from_slice(&p.x.to_bits().to_le_bytes());
        bytes.extend_from_slice(&p.y.to_bits().to_le_bytes());
    }
    master ^ fnv1a(&bytes)
}
