//! Seeded randomness. Every randomized routine derives its own stream from the
//! process-wide seed and a tag describing its inputs, so results do not depend
//! on thread scheduling.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::field::{FieldSpec, Scalar};

static SEED: AtomicU64 = AtomicU64::new(0x6772_676c_7565);

pub fn set_seed(seed: u64) {
    SEED.store(seed, Ordering::SeqCst);
}

pub fn seed() -> u64 {
    SEED.load(Ordering::SeqCst)
}

pub fn rng_for(tag: &[u8]) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed().to_le_bytes());
    h.update(tag);
    let d = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&d[..32]);
    ChaCha8Rng::from_seed(key)
}

/// A random field element; over Q an integer in [-50, 50].
pub fn random_scalar(field: FieldSpec, rng: &mut ChaCha8Rng) -> Scalar {
    match field.size() {
        Some(p) => field.from_i64(rng.gen_range(0..p) as i64),
        None => field.from_i64(rng.gen_range(-50..=50)),
    }
}
