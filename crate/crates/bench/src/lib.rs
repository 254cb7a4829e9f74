//! Seeded inputs shared by the benchmarks.

use polydist::random::random_tree;
use polydist::{Phylogeny, TreeKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two random partially resolved trees on taxa `1..=n`, reproducible from `seed`.
pub fn tree_pair(n: usize, kind: TreeKind, contract: f64, seed: u64) -> (Phylogeny, Phylogeny) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_tree(&mut rng, n, kind, contract);
    let b = random_tree(&mut rng, n, kind, contract);
    (a, b)
}

/// `k` random trees on taxa `1..=n`.
pub fn profile(n: usize, k: usize, kind: TreeKind, contract: f64, seed: u64) -> Vec<Phylogeny> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| random_tree(&mut rng, n, kind, contract)).collect()
}
