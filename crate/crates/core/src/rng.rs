//! Seed handling. Every random draw in the crate comes from a ChaCha8
//! stream selected by `(seed, stream)`, so sub-generators of one run are
//! independent and each one is reproducible on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream identifiers for the sub-generators.
pub mod stream {
    pub const NET: u64 = 1;
    pub const NET_CHECK: u64 = 2;
    pub const DIRECTIONS: u64 = 3;
    pub const FRAME_SAMPLES: u64 = 4;
    pub const BALL: u64 = 5;
    pub const EVENNESS: u64 = 6;
    pub const CAPS: u64 = 7;
    pub const HULL: u64 = 8;
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finaliser; derives a child seed from a parent seed and a tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform point on the unit sphere S^{d-1}: a normalised standard Gaussian vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-150 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Uniform point in the unit ball B^d.
pub fn ball_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let mut v = unit_vector(rng, dim);
    let r = rng.random::<f64>().powf(1.0 / dim as f64);
    v.iter_mut().for_each(|c| *c *= r);
    v
}
