//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from a caller-owned
//! [`ChaCha8Rng`]. Parallel work gets one stream per task: the key comes
//! from the seed and the ChaCha stream id from the task index, so streams
//! never overlap and results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Independent generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
