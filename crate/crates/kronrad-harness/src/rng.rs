//! Deterministic per-trial random streams.
//!
//! Every Monte Carlo trial gets its own counter-mode substream keyed by
//! `(seed, trial)`. Trials can then run on any number of threads, in any
//! order, and produce bit-identical results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for one trial of one experiment.
///
/// `stream` partitions the generator's 2^64 independent streams; callers
/// reserve disjoint stream ranges per experiment kind so reusing a seed
/// across subcommands never aliases draws.
#[must_use]
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
