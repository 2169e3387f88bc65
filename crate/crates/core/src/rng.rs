//! Deterministic random streams.
//!
//! Every Monte Carlo trial draws from its own ChaCha stream keyed by
//! `(seed, point, trial)`, so trials can run in any order, on any number of
//! threads, and still reproduce bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub type SimRng = ChaCha8Rng;

/// Stream `stream_id` of the generator keyed by `seed`.
///
/// Streams are ChaCha nonces over the same key, so distinct ids never overlap.
pub fn make_rng(seed: u64, stream_id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Generator for trial `trial` of sweep point `point`.
pub fn trial_rng(seed: u64, point: u64, trial: u64) -> SimRng {
    make_rng(splitmix64(seed ^ splitmix64(point)), trial)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// One draw of CN(0, variance): real and imaginary parts each N(0, variance/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let scale = (variance / 2.0).sqrt();
    C64::new(standard_normal(rng) * scale, standard_normal(rng) * scale)
}
