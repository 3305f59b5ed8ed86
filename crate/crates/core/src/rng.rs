//! Seeded random streams.
//!
//! Every stream is ChaCha20 (RFC 8439 block function, 20 rounds) keyed by the
//! 64-bit seed in little-endian order followed by 24 zero bytes. Replicate `k`
//! uses stream id `k`, with the block counter starting at zero. A replicate's
//! draws therefore depend only on `(seed, k)`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

pub fn key(seed: u64) -> [u8; 32] {
    let mut k = [0u8; 32];
    k[..8].copy_from_slice(&seed.to_le_bytes());
    k
}

pub fn stream(seed: u64, replicate: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::from_seed(key(seed));
    rng.set_stream(replicate);
    rng
}
