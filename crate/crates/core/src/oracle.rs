//! Brute-force reference implementations.
//!
//! Everything here works by direct enumeration: every triplet or quartet,
//! every full refinement, every phylogeny on a small taxon set. The fast
//! modules are tested against these.

use std::ops::Add;
use std::sync::Arc;

use num::{BigInt, Zero};

use crate::consensus::Profile;
use crate::error::{Error, Result};
use crate::newick::write_newick;
use crate::rational::{check_unit_interval, Rational};
use crate::tree::{
    quartet_from_path_sums, triplet_from_lca_depths, NodeId, Phylogeny, QuartetTopology, RawTree, TaxonSet,
    TreeKind, TripletTopology,
};

/// Largest `n` for which [`enumerate_phylogenies`] runs on rooted trees.
pub const MAX_ENUM_ROOTED: usize = 7;
/// Largest `n` for which [`enumerate_phylogenies`] runs on unrooted trees.
pub const MAX_ENUM_UNROOTED: usize = 8;

/// Counts of the five agreement classes of triplets or quartets between two
/// trees: resolved the same way (`s`), resolved differently (`d`), resolved
/// only in the first (`r1`) or only in the second (`r2`) tree, and
/// unresolved in both (`u`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Classification {
    pub s: u64,
    pub d: u64,
    pub r1: u64,
    pub r2: u64,
    pub u: u64,
}

impl Classification {
    pub fn total(&self) -> u64 {
        self.s + self.d + self.r1 + self.r2 + self.u
    }

    pub fn distance_pair(&self) -> DistancePair {
        DistancePair { d: self.d, r: self.r1 + self.r2 }
    }

    /// The classification with the two trees exchanged.
    pub fn swapped(&self) -> Self {
        Classification { r1: self.r2, r2: self.r1, ..*self }
    }
}

/// `d + p·r`, kept as two integers so it can be evaluated exactly at any `p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct DistancePair {
    /// Number of triplets or quartets resolved differently in both trees.
    pub d: u64,
    /// Number resolved in exactly one of the trees.
    pub r: u64,
}

impl DistancePair {
    pub fn evaluate(&self, p: &Rational) -> Result<Rational> {
        check_unit_interval(p)?;
        Ok(self.evaluate_unchecked(p))
    }

    pub(crate) fn evaluate_unchecked(&self, p: &Rational) -> Rational {
        Rational::from_integer(BigInt::from(self.d)) + p * Rational::from_integer(BigInt::from(self.r))
    }
}

impl Add for DistancePair {
    type Output = DistancePair;

    fn add(self, rhs: Self) -> Self {
        DistancePair { d: self.d + rhs.d, r: self.r + rhs.r }
    }
}

impl std::iter::Sum for DistancePair {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(DistancePair::default(), Add::add)
    }
}

/// Anything with a resolved/unresolved distinction.
pub trait Topology: Copy + Eq {
    fn resolved(self) -> bool;
}

impl Topology for TripletTopology {
    fn resolved(self) -> bool {
        self.is_resolved()
    }
}

impl Topology for QuartetTopology {
    fn resolved(self) -> bool {
        self.is_resolved()
    }
}

fn tally<T: Topology>(c: &mut Classification, a: T, b: T) {
    match (a.resolved(), b.resolved()) {
        (true, true) if a == b => c.s += 1,
        (true, true) => c.d += 1,
        (true, false) => c.r1 += 1,
        (false, true) => c.r2 += 1,
        (false, false) => c.u += 1,
    }
}

/// Pairwise LCA depths between leaves, filled in one bottom-up sweep.
pub(crate) struct LeafIndex {
    n: usize,
    lca_depth: Vec<u32>,
    leaf_depth: Vec<u32>,
}

impl LeafIndex {
    pub fn new(tree: &Phylogeny) -> Self {
        let n = tree.n();
        let mut lca_depth = vec![0u32; n * n];
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); tree.node_count()];
        for v in tree.nodes().rev() {
            if let Some(t) = tree.taxon(v) {
                below[v].push(t);
                continue;
            }
            let dv = tree.depth(v);
            let mut acc: Vec<usize> = Vec::new();
            for &c in tree.children(v) {
                let part = std::mem::take(&mut below[c]);
                for &x in &acc {
                    for &y in &part {
                        lca_depth[x * n + y] = dv;
                        lca_depth[y * n + x] = dv;
                    }
                }
                acc.extend(part);
            }
            below[v] = acc;
        }
        let leaf_depth = (0..n).map(|t| tree.depth(tree.leaf_node(t))).collect();
        LeafIndex { n, lca_depth, leaf_depth }
    }

    fn lca(&self, a: usize, b: usize) -> u32 {
        self.lca_depth[a * self.n + b]
    }

    fn dist(&self, a: usize, b: usize) -> u32 {
        self.leaf_depth[a] + self.leaf_depth[b] - 2 * self.lca(a, b)
    }

    /// Topology of a sorted triplet.
    pub fn triplet(&self, a: usize, b: usize, c: usize) -> TripletTopology {
        triplet_from_lca_depths(self.lca(a, b), self.lca(a, c), self.lca(b, c))
    }

    /// Topology of a sorted quartet.
    pub fn quartet(&self, a: usize, b: usize, c: usize, d: usize) -> QuartetTopology {
        quartet_from_path_sums(
            self.dist(a, b) + self.dist(c, d),
            self.dist(a, c) + self.dist(b, d),
            self.dist(a, d) + self.dist(b, c),
        )
    }
}

fn for_each_triplet(n: usize, mut f: impl FnMut(usize, usize, usize)) {
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                f(a, b, c);
            }
        }
    }
}

fn for_each_quartet(n: usize, mut f: impl FnMut(usize, usize, usize, usize)) {
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    f(a, b, c, d);
                }
            }
        }
    }
}

fn require(tree: &Phylogeny, kind: TreeKind) -> Result<()> {
    if tree.kind() != kind {
        return Err(Error::KindMismatch { expected: kind, found: tree.kind() });
    }
    Ok(())
}

/// Topology of every triplet, in lexicographic order of sorted triplets.
pub fn triplet_topologies(tree: &Phylogeny) -> Result<Vec<TripletTopology>> {
    require(tree, TreeKind::Rooted)?;
    let idx = LeafIndex::new(tree);
    let mut out = Vec::new();
    for_each_triplet(tree.n(), |a, b, c| out.push(idx.triplet(a, b, c)));
    Ok(out)
}

/// Topology of every quartet, in lexicographic order of sorted quartets.
pub fn quartet_topologies(tree: &Phylogeny) -> Result<Vec<QuartetTopology>> {
    require(tree, TreeKind::Unrooted)?;
    let idx = LeafIndex::new(tree);
    let mut out = Vec::new();
    for_each_quartet(tree.n(), |a, b, c, d| out.push(idx.quartet(a, b, c, d)));
    Ok(out)
}

/// Classification of two topology listings over the same index order.
pub fn classify_listings<T: Topology>(first: &[T], second: &[T]) -> Classification {
    let mut c = Classification::default();
    for (&a, &b) in first.iter().zip(second) {
        tally(&mut c, a, b);
    }
    c
}

/// Classifies all `C(n,3)` triplets of two rooted trees.
pub fn classify_triplets(t1: &Phylogeny, t2: &Phylogeny) -> Result<Classification> {
    require(t1, TreeKind::Rooted)?;
    t1.check_comparable(t2)?;
    let (i1, i2) = (LeafIndex::new(t1), LeafIndex::new(t2));
    let mut c = Classification::default();
    for_each_triplet(t1.n(), |a, b, x| tally(&mut c, i1.triplet(a, b, x), i2.triplet(a, b, x)));
    Ok(c)
}

/// Classifies all `C(n,4)` quartets of two unrooted trees.
pub fn classify_quartets(t1: &Phylogeny, t2: &Phylogeny) -> Result<Classification> {
    require(t1, TreeKind::Unrooted)?;
    t1.check_comparable(t2)?;
    let (i1, i2) = (LeafIndex::new(t1), LeafIndex::new(t2));
    let mut c = Classification::default();
    for_each_quartet(t1.n(), |a, b, x, y| tally(&mut c, i1.quartet(a, b, x, y), i2.quartet(a, b, x, y)));
    Ok(c)
}

/// Classifies triplets (rooted) or quartets (unrooted).
pub fn classify(t1: &Phylogeny, t2: &Phylogeny) -> Result<Classification> {
    match t1.kind() {
        TreeKind::Rooted => classify_triplets(t1, t2),
        TreeKind::Unrooted => classify_quartets(t1, t2),
    }
}

/// Resolved and unresolved triplet (rooted) or quartet (unrooted) counts.
pub fn resolved_counts(tree: &Phylogeny) -> (u64, u64) {
    let c = classify(tree, tree).expect("a tree is comparable to itself");
    (c.s, c.u)
}

/// Number of full refinements: the product over polytomies of the number of
/// binary shapes on their parts, `(2d-3)!!` for `d` rooted children and
/// `(2d-5)!!` for unrooted degree `d`.
pub fn full_refinement_count(tree: &Phylogeny) -> u128 {
    let mut total: u128 = 1;
    for v in tree.unresolved_nodes() {
        let parts = match tree.kind() {
            TreeKind::Rooted => tree.children(v).len(),
            TreeKind::Unrooted => tree.degree(v) - 1,
        };
        total = total.saturating_mul(rooted_shape_count(parts));
    }
    total
}

/// `(2k-3)!!`, the number of rooted binary trees on `k` labelled parts.
fn rooted_shape_count(k: usize) -> u128 {
    (2..k).fold(1u128, |acc, i| acc.saturating_mul((2 * i - 1) as u128))
}

#[derive(Clone, Debug)]
enum Shape {
    Part(usize),
    Join(Box<Shape>, Box<Shape>),
}

/// All rooted binary shapes on parts `0..k`, grown by inserting each part
/// on every edge of the shapes without it.
fn rooted_shapes(k: usize) -> Vec<Shape> {
    fn insert(shape: &Shape, part: usize, out: &mut Vec<Shape>) {
        out.push(Shape::Join(Box::new(shape.clone()), Box::new(Shape::Part(part))));
        if let Shape::Join(l, r) = shape {
            let mut left = Vec::new();
            insert(l, part, &mut left);
            for s in left {
                out.push(Shape::Join(Box::new(s), r.clone()));
            }
            let mut right = Vec::new();
            insert(r, part, &mut right);
            for s in right {
                out.push(Shape::Join(l.clone(), Box::new(s)));
            }
        }
    }
    let mut shapes = vec![Shape::Part(0)];
    for part in 1..k {
        let mut next = Vec::new();
        for s in &shapes {
            insert(s, part, &mut next);
        }
        shapes = next;
    }
    shapes
}

/// Materializes a shape whose parts are existing node ids; returns the
/// node heading the shape.
fn build_shape(shape: &Shape, parts: &[NodeId], raw: &mut RawTree) -> NodeId {
    match shape {
        Shape::Part(i) => parts[*i],
        Shape::Join(l, r) => {
            let a = build_shape(l, parts, raw);
            let b = build_shape(r, parts, raw);
            raw.add_internal(vec![a, b])
        }
    }
}

/// Every fully resolved refinement of `tree`.
pub fn enumerate_full_refinements(tree: &Phylogeny, cap: u128) -> Result<Vec<Phylogeny>> {
    let predicted = full_refinement_count(tree);
    if predicted > cap {
        return Err(Error::Capacity { predicted, cap });
    }
    let polytomies: Vec<NodeId> = tree.unresolved_nodes().collect();
    // For each polytomy: the children that get arranged, and whether the
    // first child stays attached directly (the unrooted handle).
    let plans: Vec<(Vec<NodeId>, Option<NodeId>)> = polytomies
        .iter()
        .map(|&v| {
            let kids = tree.children(v).to_vec();
            if tree.kind() == TreeKind::Unrooted && tree.parent(v).is_none() {
                (kids[1..].to_vec(), Some(kids[0]))
            } else {
                (kids, None)
            }
        })
        .collect();
    let shapes: Vec<Vec<Shape>> = plans.iter().map(|(kids, _)| rooted_shapes(kids.len())).collect();
    let mut out = Vec::with_capacity(predicted as usize);
    let mut choice = vec![0usize; polytomies.len()];
    loop {
        let mut raw = RawTree::from_tree(tree);
        for (i, &v) in polytomies.iter().enumerate() {
            let (kids, anchor) = &plans[i];
            let Shape::Join(l, r) = &shapes[i][choice[i]] else {
                unreachable!("a polytomy arranges at least three parts");
            };
            let left = build_shape(l, kids, &mut raw);
            let right = build_shape(r, kids, &mut raw);
            raw.children[v] = anchor.iter().copied().chain([left, right]).collect();
        }
        out.push(raw.finish(tree.kind(), tree.taxa().clone())?);
        // Advance the mixed-radix counter.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < shapes[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Every phylogeny on taxa labelled `1..=n`, each exactly once.
///
/// Trees on `n` taxa are grown from those on `n - 1` by inserting the new
/// leaf on every edge, at every internal node, and (rooted only) above the
/// root. Deleting the new leaf inverts each insertion, so nothing repeats.
pub fn enumerate_phylogenies(n: usize, kind: TreeKind) -> Result<Vec<Phylogeny>> {
    let cap = match kind {
        TreeKind::Rooted => MAX_ENUM_ROOTED,
        TreeKind::Unrooted => MAX_ENUM_UNROOTED,
    };
    if n == 0 || n > cap {
        return Err(Error::OutOfRange(format!("enumeration of {kind} trees supports 1 <= n <= {cap}, got {n}")));
    }
    let one = Arc::new(TaxonSet::numbered(1)?);
    let mut trees = vec![Phylogeny::from_children(kind, one, vec![vec![]], vec![Some(0)], 0)?];
    for k in 2..=n {
        let taxa = Arc::new(TaxonSet::numbered(k)?);
        let new = k - 1;
        let mut next = Vec::new();
        for t in &trees {
            if kind == TreeKind::Unrooted && k <= 3 {
                // Below three taxa there is a single unrooted tree: a star.
                next.push(unrooted_small(taxa.clone())?);
                break;
            }
            for v in t.nodes() {
                // Subdivide the edge above v; above the root only when rooted.
                if t.parent(v).is_some() || kind == TreeKind::Rooted {
                    let mut raw = RawTree::from_tree(t);
                    let leaf = raw.add_leaf(new);
                    let mid = raw.add_internal(vec![v, leaf]);
                    match t.parent(v) {
                        Some(p) => {
                            for c in raw.children[p].iter_mut() {
                                if *c == v {
                                    *c = mid;
                                }
                            }
                        }
                        None => raw.root = mid,
                    }
                    next.push(raw.finish(kind, taxa.clone())?);
                }
                if !t.is_leaf(v) {
                    let mut raw = RawTree::from_tree(t);
                    let leaf = raw.add_leaf(new);
                    raw.children[v].push(leaf);
                    next.push(raw.finish(kind, taxa.clone())?);
                }
            }
        }
        trees = next;
    }
    Ok(trees)
}

fn unrooted_small(taxa: Arc<TaxonSet>) -> Result<Phylogeny> {
    let n = taxa.len();
    let children = std::iter::once((1..=n).collect()).chain((0..n).map(|_| vec![])).collect();
    let taxon = std::iter::once(None).chain((0..n).map(Some)).collect();
    Phylogeny::from_children(TreeKind::Unrooted, taxa, children, taxon, 0)
}

fn topology_listing(tree: &Phylogeny) -> Listing {
    match tree.kind() {
        TreeKind::Rooted => Listing::Triplets(triplet_topologies(tree).expect("rooted")),
        TreeKind::Unrooted => Listing::Quartets(quartet_topologies(tree).expect("unrooted")),
    }
}

enum Listing {
    Triplets(Vec<TripletTopology>),
    Quartets(Vec<QuartetTopology>),
}

impl Listing {
    fn classify(&self, other: &Listing) -> Classification {
        match (self, other) {
            (Listing::Triplets(a), Listing::Triplets(b)) => classify_listings(a, b),
            (Listing::Quartets(a), Listing::Quartets(b)) => classify_listings(a, b),
            _ => unreachable!("listings of one kind"),
        }
    }
}

/// Exact Hausdorff distance: the larger of the two directed max-min values
/// of `|D|` over the full refinements of each tree.
pub fn hausdorff_exact(t1: &Phylogeny, t2: &Phylogeny, cap: u128) -> Result<u64> {
    t1.check_comparable(t2)?;
    let predicted = full_refinement_count(t1).saturating_mul(full_refinement_count(t2));
    if predicted > cap {
        return Err(Error::Capacity { predicted, cap });
    }
    let f1: Vec<Listing> = enumerate_full_refinements(t1, cap)?.iter().map(topology_listing).collect();
    let f2: Vec<Listing> = enumerate_full_refinements(t2, cap)?.iter().map(topology_listing).collect();
    let mut table = vec![vec![0u64; f2.len()]; f1.len()];
    for (i, a) in f1.iter().enumerate() {
        for (j, b) in f2.iter().enumerate() {
            table[i][j] = a.classify(b).d;
        }
    }
    let forward = table.iter().map(|row| *row.iter().min().expect("non-empty")).max().expect("non-empty");
    let backward = (0..f2.len())
        .map(|j| table.iter().map(|row| row[j]).min().expect("non-empty"))
        .max()
        .expect("non-empty");
    Ok(forward.max(backward))
}

/// Exhaustive median: every minimizer of the total distance to the profile.
#[derive(Clone, Debug)]
pub struct MedianResult {
    pub total: Rational,
    /// All co-optimal trees, sorted by their Newick text.
    pub trees: Vec<Phylogeny>,
}

/// Minimizes `Σ d^(p)(T, P_i)` over every phylogeny on the profile's taxa.
pub fn median_exhaustive(profile: &Profile, p: &Rational) -> Result<MedianResult> {
    check_unit_interval(p)?;
    let kind = profile.kind();
    let n = profile.taxa().len();
    let candidates: Vec<Phylogeny> = enumerate_phylogenies(n, kind)?
        .into_iter()
        .map(|t| relabel_numbered(&t, profile.taxa().clone()))
        .collect::<Result<_>>()?;
    let members: Vec<Listing> = profile.trees().iter().map(topology_listing).collect();
    let mut best: Option<Rational> = None;
    let mut winners: Vec<Phylogeny> = Vec::new();
    for cand in candidates {
        let listing = topology_listing(&cand);
        let pair: DistancePair = members.iter().map(|m| listing.classify(m).distance_pair()).sum();
        let total = pair.evaluate_unchecked(p);
        match &best {
            Some(b) if total > *b => {}
            Some(b) if total == *b => winners.push(cand),
            _ => {
                best = Some(total);
                winners = vec![cand];
            }
        }
    }
    let mut keyed: Vec<(String, Phylogeny)> = winners.into_iter().map(|t| (write_newick(&t), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(MedianResult {
        total: best.unwrap_or_else(Rational::zero),
        trees: keyed.into_iter().map(|(_, t)| t).collect(),
    })
}

/// Maps an enumerated tree over `1..=n` onto `taxa` by position.
fn relabel_numbered(tree: &Phylogeny, taxa: Arc<TaxonSet>) -> Result<Phylogeny> {
    let children = tree.nodes().map(|v| tree.children(v).to_vec()).collect();
    let taxon = tree.nodes().map(|v| tree.taxon(v)).collect();
    Phylogeny::from_children(tree.kind(), taxa, children, taxon, tree.root())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;
    use crate::rational::{integer, rational};
    use crate::tree::is_refinement;
    use std::collections::HashSet;

    fn rooted(s: &str) -> Phylogeny {
        parse_newick(s, TreeKind::Rooted).unwrap()
    }

    fn unrooted(s: &str) -> Phylogeny {
        parse_newick(s, TreeKind::Unrooted).unwrap()
    }

    fn pair(a: &str, b: &str, kind: TreeKind) -> (Phylogeny, Phylogeny) {
        let t1 = parse_newick(a, kind).unwrap();
        let t2 = parse_newick(b, kind).unwrap().with_taxa(t1.taxa().clone()).unwrap();
        (t1, t2)
    }

    #[test]
    fn identical_trees_only_share() {
        let t = rooted("((a,b),c,(d,e));");
        let c = classify_triplets(&t, &t).unwrap();
        assert_eq!((c.d, c.r1, c.r2), (0, 0, 0));
        assert_eq!(c.s + c.u, 10);
    }

    #[test]
    fn caterpillar_against_partial() {
        let (t1, t2) = pair("(((a,b),c),d);", "((a,b),c,d);", TreeKind::Rooted);
        let c = classify_triplets(&t1, &t2).unwrap();
        assert_eq!(c, Classification { s: 2, d: 0, r1: 2, r2: 0, u: 0 });
    }

    #[test]
    fn balanced_trees_disagree_everywhere() {
        let (t1, t2) = pair("((a,b),(c,d));", "((a,c),(b,d));", TreeKind::Rooted);
        let c = classify_triplets(&t1, &t2).unwrap();
        assert_eq!(c, Classification { s: 0, d: 4, r1: 0, r2: 0, u: 0 });
    }

    #[test]
    fn quartet_examples() {
        let (t1, t2) = pair("(a,b,(c,d));", "(a,b,c,d);", TreeKind::Unrooted);
        assert_eq!(classify_quartets(&t1, &t2).unwrap(), Classification { r1: 1, ..Default::default() });
        let star = unrooted("(a,b,c,d,e);");
        assert_eq!(classify_quartets(&star, &star).unwrap(), Classification { u: 5, ..Default::default() });
        let (t1, t2) = pair("(a,b,(c,d));", "(a,c,(b,d));", TreeKind::Unrooted);
        assert_eq!(classify_quartets(&t1, &t2).unwrap(), Classification { d: 1, ..Default::default() });
    }

    #[test]
    fn classification_rejects_mismatches() {
        let a = rooted("((a,b),c);");
        let b = rooted("((a,b),d);");
        assert_eq!(classify_triplets(&a, &b).unwrap_err(), Error::TaxonMismatch);
        assert!(classify_quartets(&a, &a).is_err());
    }

    #[test]
    fn evaluate_distance_pairs() {
        let half = rational(1, 2);
        assert_eq!(DistancePair { d: 0, r: 2 }.evaluate(&half).unwrap(), integer(1));
        assert_eq!(DistancePair { d: 4, r: 0 }.evaluate(&rational(2, 7)).unwrap(), integer(4));
        assert_eq!(DistancePair::default().evaluate(&half).unwrap(), integer(0));
        assert!(DistancePair::default().evaluate(&rational(3, 2)).is_err());
    }

    #[test]
    fn refinements_of_a_fan() {
        let fan = rooted("(a,b,c);");
        let refs = enumerate_full_refinements(&fan, 100).unwrap();
        let text: HashSet<String> = refs.iter().map(write_newick).collect();
        let expected: HashSet<String> =
            ["((a,b),c);", "((a,c),b);", "(a,(b,c));"].iter().map(|s| s.to_string()).collect();
        assert_eq!(text, expected);
        assert_eq!(enumerate_full_refinements(&rooted("(a,b,c,d);"), 100).unwrap().len(), 15);
        let binary = rooted("((a,b),(c,d));");
        assert_eq!(enumerate_full_refinements(&binary, 1).unwrap().len(), 1);
    }

    #[test]
    fn refinement_cap_is_checked_first() {
        let fan = rooted("(a,b,c,d,e,f,g,h,i,j,k,l);");
        assert!(matches!(enumerate_full_refinements(&fan, 1000), Err(Error::Capacity { .. })));
    }

    #[test]
    fn refinements_are_distinct_binary_refinements() {
        for kind in [TreeKind::Rooted, TreeKind::Unrooted] {
            let n = if kind == TreeKind::Rooted { 5 } else { 6 };
            for t in enumerate_phylogenies(n, kind).unwrap() {
                let refs = enumerate_full_refinements(&t, 10_000).unwrap();
                assert_eq!(refs.len() as u128, full_refinement_count(&t));
                let mut seen = HashSet::new();
                for r in &refs {
                    assert!(r.is_fully_resolved());
                    assert!(is_refinement(&t, r).unwrap());
                    assert!(seen.insert(r.canonical_form()));
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<usize> =
            (1..=6).map(|n| enumerate_phylogenies(n, TreeKind::Rooted).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 26, 236, 2752]);
        let counts: Vec<usize> =
            (1..=7).map(|n| enumerate_phylogenies(n, TreeKind::Unrooted).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 4, 26, 236, 2752]);
        assert!(enumerate_phylogenies(8, TreeKind::Rooted).is_err());
        assert!(enumerate_phylogenies(0, TreeKind::Unrooted).is_err());
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        for kind in [TreeKind::Rooted, TreeKind::Unrooted] {
            let trees = enumerate_phylogenies(5, kind).unwrap();
            let forms: HashSet<String> = trees.iter().map(Phylogeny::canonical_form).collect();
            assert_eq!(forms.len(), trees.len());
            assert!(trees.iter().all(|t| t.validate().is_empty()));
        }
    }

    #[test]
    fn hausdorff_small_cases() {
        let (fan, ab_c) = pair("(a,b,c);", "((a,b),c);", TreeKind::Rooted);
        assert_eq!(hausdorff_exact(&fan, &ab_c, 100).unwrap(), 1);
        assert_eq!(hausdorff_exact(&ab_c, &ab_c, 100).unwrap(), 0);
        // Every refinement of the fan has itself as a counterpart at distance 0.
        assert_eq!(hausdorff_exact(&fan, &fan, 100).unwrap(), 0);
        assert!(matches!(hausdorff_exact(&fan, &fan, 8), Err(Error::Capacity { predicted: 9, cap: 8 })));
    }

    fn profile(trees: &[&str], kind: TreeKind) -> Profile {
        let parsed: Vec<Phylogeny> = trees.iter().map(|s| parse_newick(s, kind).unwrap()).collect();
        Profile::new(crate::newick::align_taxa(parsed).unwrap()).unwrap()
    }

    #[test]
    fn median_of_the_three_triplets() {
        let prof = profile(&["((a,b),c);", "((a,c),b);", "((b,c),a);"], TreeKind::Rooted);
        let half = median_exhaustive(&prof, &rational(1, 2)).unwrap();
        assert_eq!(half.total, rational(3, 2));
        assert_eq!(half.trees.len(), 1);
        assert_eq!(write_newick(&half.trees[0]), "(a,b,c);");
        let one = median_exhaustive(&prof, &integer(1)).unwrap();
        assert_eq!(one.total, integer(2));
        assert_eq!(one.trees.len(), 3);
        assert!(one.trees.iter().all(Phylogeny::is_fully_resolved));
    }

    #[test]
    fn median_of_identical_trees() {
        let prof = profile(&["((a,b),(c,d));"; 3], TreeKind::Rooted);
        let m = median_exhaustive(&prof, &rational(2, 3)).unwrap();
        assert_eq!(m.total, integer(0));
        assert_eq!(m.trees.len(), 1);
        assert!(m.trees[0].is_isomorphic(&prof.trees()[0]));
    }
}
