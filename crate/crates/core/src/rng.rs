//! Seeded substreams.
//!
//! Every random draw comes from `ChaCha8Rng::seed_from_u64(seed)` with the
//! stream number `(domain << 56) | index`. Setting `i` of a plan, the shots of
//! setting `i`, and so on each get their own stream, so results do not depend
//! on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Domain {
    Plan = 1,
    Outcomes = 2,
    State = 3,
    EigenMonteCarlo = 4,
    Validation = 5,
}

pub fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    assert!(index < 1 << 56, "substream index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 56) | index);
    rng
}
