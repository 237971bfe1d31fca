//! Per-path random streams.
//!
//! Stream `i` of master seed `s` is a ChaCha8 generator keyed by
//! `SHA-256(label ‖ s ‖ i)`, so streams are independent of each other and of
//! the order in which paths are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn stream_key(master: u64, label: &str, index: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(label.as_bytes());
    h.update([0u8]);
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(digest.as_slice());
    key
}

pub fn stream(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(stream_key(master, label, index))
}

/// Generator for path `index` of an ensemble.
pub fn path_rng(master: u64, index: u64) -> ChaCha8Rng {
    stream(master, "path", index)
}

/// Short printable identifier of a path's stream.
pub fn path_seed(master: u64, index: u64) -> u64 {
    let key = stream_key(master, "path", index);
    u64::from_le_bytes(key[..8].try_into().expect("eight bytes"))
}
