//! Fixtures shared by the benchmarks in `benches/`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strandkit_core::arc::{random_arc, GenBounds};
use strandkit_core::{Datum, TaggedArc};

/// `n` seeded random arc pairs with the default generation bounds.
pub fn random_pairs(d: &Datum, seed: u64, n: usize) -> Vec<(TaggedArc, TaggedArc)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = GenBounds::default();
    (0..n).map(|_| (random_arc(d, &mut rng, b), random_arc(d, &mut rng, b))).collect()
}
