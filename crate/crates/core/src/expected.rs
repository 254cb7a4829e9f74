//! Resolution statistics of uniformly random trees and the expected distance
//! between two of them.

use std::sync::Arc;

use num::{BigInt, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::{classify, enumerate_phylogenies, DistancePair, LeafIndex};
use crate::quartet::choose4;
use crate::rational::{check_unit_interval, rational, to_f64, Rational};
use crate::tree::{Phylogeny, RawTree, TaxonSet, TreeKind};
use crate::triplet::{choose3, parametric_triplet_distance};

/// How often a fixed triplet (rooted) or quartet (unrooted) is resolved
/// across all trees on `n` taxa.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionStats {
    pub n: usize,
    pub kind: TreeKind,
    pub trees_total: u64,
    /// Trees resolving the triplet `{1, 2, 3}` or quartet `{1, 2, 3, 4}`.
    pub resolved_count: u64,
    pub r: Rational,
    pub u: Rational,
}

/// Counts over the full enumeration of trees on `n` taxa.
pub fn exact_resolution_probability(n: usize, kind: TreeKind) -> Result<ResolutionStats> {
    let arity = match kind {
        TreeKind::Rooted => 3,
        TreeKind::Unrooted => 4,
    };
    if n < arity {
        return Err(Error::OutOfRange(format!("{kind} resolution statistics need n >= {arity}, got {n}")));
    }
    let trees = enumerate_phylogenies(n, kind)?;
    let resolved_count = trees.iter().filter(|t| resolves(t, &[0, 1, 2, 3][..arity])).count() as u64;
    let trees_total = trees.len() as u64;
    let r = Rational::new(BigInt::from(resolved_count), BigInt::from(trees_total));
    let u = Rational::one() - &r;
    Ok(ResolutionStats { n, kind, trees_total, resolved_count, r, u })
}

fn resolves(tree: &Phylogeny, taxa: &[usize]) -> bool {
    let idx = LeafIndex::new(tree);
    match *taxa {
        [a, b, c] => idx.triplet(a, b, c).is_resolved(),
        [a, b, c, d] => idx.quartet(a, b, c, d).is_resolved(),
        _ => unreachable!("triplets and quartets only"),
    }
}

/// Expected `d^(p)` between two trees drawn independently and uniformly:
/// `C(n,4)·((2/3)r² + 2p·r·u)` with the unrooted statistics of `n` taxa, or
/// `C(n,3)·((2/3)r² + 2p·r·u)` with the unrooted statistics of `n + 1` taxa
/// for rooted trees.
pub fn expected_distance_formula(n: usize, p: &Rational, kind: TreeKind) -> Result<Rational> {
    check_unit_interval(p)?;
    let count = match kind {
        TreeKind::Rooted => choose3(n as u64),
        TreeKind::Unrooted => choose4(n as u64),
    };
    if count == 0 {
        return Ok(Rational::zero());
    }
    let (count, stats) = match kind {
        TreeKind::Rooted => (choose3(n as u64), exact_resolution_probability(n + 1, TreeKind::Unrooted)?),
        TreeKind::Unrooted => (choose4(n as u64), exact_resolution_probability(n, TreeKind::Unrooted)?),
    };
    Ok(formula_from(count, &stats.r, p))
}

/// `count·((2/3)r² + 2p·r·(1 - r))`.
pub fn formula_from(count: u64, r: &Rational, p: &Rational) -> Rational {
    let u = Rational::one() - r;
    let per_item = rational(2, 3) * r * r + rational(2, 1) * p * r * u;
    Rational::from_integer(BigInt::from(count)) * per_item
}

/// Mean of `d^(p)` over every ordered pair of trees on `n` taxa.
pub fn exact_expected_distance(n: usize, p: &Rational, kind: TreeKind) -> Result<Rational> {
    check_unit_interval(p)?;
    let trees = enumerate_phylogenies(n, kind)?;
    let mut total = DistancePair::default();
    for a in &trees {
        for b in &trees {
            total = total + pair_distance(a, b)?;
        }
    }
    let pairs = BigInt::from(trees.len()) * BigInt::from(trees.len());
    Ok(total.evaluate_unchecked(p) / Rational::from_integer(pairs))
}

fn pair_distance(a: &Phylogeny, b: &Phylogeny) -> Result<DistancePair> {
    match a.kind() {
        TreeKind::Rooted => parametric_triplet_distance(a, b),
        TreeKind::Unrooted => Ok(classify(a, b)?.distance_pair()),
    }
}

#[derive(Clone, Debug)]
pub struct EmpiricalEstimate {
    pub mean: Rational,
    /// Standard error of the mean.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Averages `d^(p)` over `samples` pairs drawn with replacement from the
/// enumerated tree space.
pub fn empirical_expected_distance(
    n: usize,
    p: &Rational,
    kind: TreeKind,
    samples: usize,
    seed: u64,
) -> Result<EmpiricalEstimate> {
    check_unit_interval(p)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is needed".into()));
    }
    let trees = enumerate_phylogenies(n, kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pf = to_f64(p);
    let mut total = DistancePair::default();
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let a = &trees[rng.random_range(0..trees.len())];
        let b = &trees[rng.random_range(0..trees.len())];
        let pair = pair_distance(a, b)?;
        let x = pair.d as f64 + pf * pair.r as f64;
        sum += x;
        sum_sq += x * x;
        total = total + pair;
    }
    let k = samples as f64;
    let stderr = if samples > 1 {
        let var = ((sum_sq - sum * sum / k) / (k - 1.0)).max(0.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    let mean = total.evaluate_unchecked(p) / Rational::from_integer(BigInt::from(samples));
    Ok(EmpiricalEstimate { mean, stderr, samples, seed })
}

/// Attaches a new leaf to the root of a rooted tree and forgets the root.
/// The new taxon is labelled `n + 1`, or the next free integer if that
/// label is taken. A triplet is resolved in the input exactly when the
/// triplet plus the new leaf is a resolved quartet of the output.
pub fn add_leaf(tree: &Phylogeny) -> Result<Phylogeny> {
    if tree.kind() != TreeKind::Rooted {
        return Err(Error::KindMismatch { expected: TreeKind::Rooted, found: tree.kind() });
    }
    let n = tree.n();
    let mut labels: Vec<String> = tree.taxa().labels().to_vec();
    let fresh = (n + 1..).map(|i| i.to_string()).find(|l| tree.taxa().index_of(l).is_none()).expect("unbounded");
    labels.push(fresh);
    let taxa = Arc::new(TaxonSet::new(labels)?);
    let mut raw = RawTree::from_tree(tree);
    let leaf = raw.add_leaf(n);
    if tree.is_leaf(tree.root()) {
        raw.root = raw.add_internal(vec![tree.root(), leaf]);
    } else {
        raw.children[tree.root()].push(leaf);
    }
    raw.finish(TreeKind::Unrooted, taxa)
}

/// `sqrt(π(2 ln 2 - 1) / (4n))`, the leading term of the probability that a
/// fixed quartet is unresolved in a uniformly random tree.
pub fn asymptotic_unresolved(n: usize) -> f64 {
    assert!(n >= 1, "n must be positive");
    (std::f64::consts::PI * (2.0 * std::f64::consts::LN_2 - 1.0) / (4.0 * n as f64)).sqrt()
}
