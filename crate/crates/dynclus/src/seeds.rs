//! Sub-seeds derived from one master seed by fixed hashing.

use sha2::{Digest, Sha256};

/// First eight bytes of `SHA-256(seed || label || index)`, little endian.
pub fn sub_seed(seed: u64, label: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    h.update(index.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}
