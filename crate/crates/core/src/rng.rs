//! Seeded randomness.
//!
//! Every sampler in the crate draws from a ChaCha8 generator built with
//! `ChaCha8Rng::seed_from_u64(seed)` and then moved to an independent stream
//! with `set_stream(stream)`. Alternate implementations that use the same
//! algorithm, seed expansion and stream indices reproduce our traces.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

/// Stream indices used by the samplers, fixed so traces stay stable.
pub mod streams {
    pub const PAIRS: u64 = 0;
    pub const AUX: u64 = 1;
    pub const GAINS: u64 = 2;
    pub const HINTS: u64 = 3;
}

pub fn stream_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniformly distributed unit vector in `dim` dimensions.
pub fn unit_vector(rng: &mut SeededRng, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Log-uniform draw in `[lo, hi]`.
pub fn log_uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}
