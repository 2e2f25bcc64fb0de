//! Reproducible per-replicate random streams.
//!
//! A stream is addressed by `(seed, domain, index)`. The ChaCha key is
//! derived from `(seed, domain)` and `index` selects the ChaCha stream, so
//! the draw sequence of any replicate depends only on its address and never
//! on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand::Rng;

/// Generator type handed to every sampler.
pub type Stream = ChaCha8Rng;

/// Domain tags separating independent families of streams under one seed.
pub mod domain {
    pub const REPLICATE: u64 = 0;
    pub const RESAMPLE: u64 = 1;
    pub const AUXILIARY: u64 = 2;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn key(seed: u64, domain: u64) -> [u8; 32] {
    let mut out = [0u8; 32];
    let mut s = seed ^ splitmix64(domain.wrapping_add(0x5eed));
    for chunk in out.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    out
}

/// Stream for replicate `index` in `domain` under `seed`.
pub fn stream(seed: u64, domain: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::from_seed(key(seed, domain));
    rng.set_stream(index);
    rng
}

/// Shorthand for the main replicate domain.
pub fn replicate_stream(seed: u64, replicate: u64) -> Stream {
    stream(seed, domain::REPLICATE, replicate)
}

/// Uniform on `(0, 1]`, suitable for inverse-tail sampling.
#[inline]
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 53 random bits, shifted away from zero.
    ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
}
