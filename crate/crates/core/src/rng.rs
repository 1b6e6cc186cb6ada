//! Keyed random streams.
//!
//! A stream is identified by a master seed and a key (sample id, epoch,
//! purpose). The key is hashed into a ChaCha seed, so every stream can be
//! recreated independently of evaluation order or thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub sample_id: String,
    pub epoch: u64,
    pub purpose: String,
}

impl StreamKey {
    pub fn new(seed: u64, sample_id: &str, epoch: u64, purpose: &str) -> Self {
        Self {
            seed,
            sample_id: sample_id.to_string(),
            epoch,
            purpose: purpose.to_string(),
        }
    }

    fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"bioens-rng-v1");
        h.update(self.seed.to_le_bytes());
        h.update((self.sample_id.len() as u64).to_le_bytes());
        h.update(self.sample_id.as_bytes());
        h.update(self.epoch.to_le_bytes());
        h.update((self.purpose.len() as u64).to_le_bytes());
        h.update(self.purpose.as_bytes());
        h.finalize().into()
    }

    /// Short printable form of the derived key, as written to manifests.
    pub fn hex(&self) -> String {
        self.digest()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.digest())
    }
}

/// Shorthand for `StreamKey::new(..).rng()`.
pub fn stream(seed: u64, sample_id: &str, epoch: u64, purpose: &str) -> ChaCha8Rng {
    StreamKey::new(seed, sample_id, epoch, purpose).rng()
}

/// Hex SHA-256 of raw bytes.
pub fn sha256_bytes_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hex SHA-256 of the parts, each length-prefixed.
pub fn sha256_hex(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
