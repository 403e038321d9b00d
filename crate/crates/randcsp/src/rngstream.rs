//! Named, splittable random streams.
//!
//! Every sampler and estimator in this crate derives its randomness from a
//! [`SeedSpec`] plus a textual label and an index. The derivation hashes
//! `(master_seed, stream_id, label, index)` with SHA-256 into a ChaCha12 key,
//! so distinct labels and indices give independent streams, results are
//! bit-identical across platforms and thread counts, and any single trial can
//! be replayed in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Identifies one random stream: a user-chosen master seed plus a stream id
/// (typically a trial index). Equal `(master_seed, stream_id)` values fed to
/// the same sampler spec always reproduce the same output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Derives the RNG for `(label, index)` under this seed.
    pub fn rng(&self, label: &str, index: u64) -> ChaCha12Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.master_seed.to_le_bytes());
        hasher.update(self.stream_id.to_le_bytes());
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        hasher.update(index.to_le_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        ChaCha12Rng::from_seed(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_seeds_reproduce_streams() {
        let a = SeedSpec::new(7, 3);
        let b = SeedSpec::new(7, 3);
        let xs: Vec<u64> = a.rng("clause", 5).sample_iter(rand::distributions::Standard).take(16).collect();
        let ys: Vec<u64> = b.rng("clause", 5).sample_iter(rand::distributions::Standard).take(16).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn labels_and_indices_split_streams() {
        let s = SeedSpec::new(7, 3);
        let base: u64 = s.rng("clause", 5).gen();
        assert_ne!(base, s.rng("clause", 6).gen::<u64>());
        assert_ne!(base, s.rng("m", 5).gen::<u64>());
        assert_ne!(base, SeedSpec::new(7, 4).rng("clause", 5).gen::<u64>());
        assert_ne!(base, SeedSpec::new(8, 3).rng("clause", 5).gen::<u64>());
    }

    #[test]
    fn label_boundaries_do_not_collide() {
        // ("ab", idx with first byte 'c') must differ from ("abc", ...): the
        // label length is hashed before the label bytes.
        let s = SeedSpec::new(1, 1);
        let x: u64 = s.rng("ab", u64::from_le_bytes(*b"c\0\0\0\0\0\0\0")).gen();
        let y: u64 = s.rng("abc", 0).gen();
        assert_ne!(x, y);
    }
}
