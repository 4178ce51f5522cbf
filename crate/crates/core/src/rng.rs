//! Seeded, splittable random streams.
//!
//! Every randomized routine takes an explicit `u64` seed. Independent work
//! items (simulation trials, rounding trials, multistarts) draw from their
//! own ChaCha stream selected by index, so results do not depend on how
//! the work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Environment variable consulted by the CLI for a default seed.
pub const SEED_ENV: &str = "NETREV_SEED";

pub const DEFAULT_SEED: u64 = 0x5eed_2013;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `index` of the generator family rooted at `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
