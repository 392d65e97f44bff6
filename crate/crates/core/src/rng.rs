//! Reproducible random streams.
//!
//! Every random quantity is drawn from ChaCha20 keyed by `seed_from_u64(seed)`
//! with the stream number selecting an independent sequence, so sample `k`
//! depends only on `(seed, k)` and not on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

/// Independent generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
