//! Independent random streams derived from one seed.
//!
//! Each purpose draws from its own ChaCha stream, so adding draws for one
//! purpose (say, message loss) never shifts another (node placement).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Placement = 1,
    Sinks = 2,
    Stimuli = 3,
    DutyPhase = 4,
    Loss = 5,
    Jitter = 6,
    Flush = 7,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
