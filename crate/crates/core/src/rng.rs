//! Keyed draw streams.
//!
//! Every random decision in the crate is drawn from a counter-based stream
//! addressed by (master seed, stream index). Streams are mutually
//! independent, so consumers can draw in any order (or in parallel) and
//! still produce identical results for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for one stream under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// First uniform draw in [0, 1) from the (seed, stream) generator.
pub fn stream_draw(seed: u64, stream: u64) -> f64 {
    stream_rng(seed, stream).gen::<f64>()
}
