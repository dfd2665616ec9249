//! Seeded randomness.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`) seeded
//! with `seed_from_u64(seed)`; independent consumers of one seed use distinct
//! ChaCha stream ids. Gaussian draws use `rand_distr::StandardNormal`
//! (ziggurat method), scaled by the requested standard deviation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 1,
    Split = 2,
    Shuffle = 3,
    Noise = 4,
    Fixture = 5,
}

pub fn rng_for(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
