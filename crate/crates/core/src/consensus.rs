//! Profiles of trees and their approximate medians.

use std::sync::Arc;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::oracle::{classify_quartets, DistancePair, LeafIndex};
use crate::quartet::quartet_distance_half;
use crate::rational::{check_unit_interval, rational, Rational};
use crate::tree::{NodeId, Phylogeny, TaxonSet, TreeKind};
use crate::triplet::parametric_triplet_distance;

/// A non-empty sequence of trees of one kind over one taxon set.
#[derive(Clone, Debug)]
pub struct Profile {
    trees: Vec<Phylogeny>,
}

impl Profile {
    pub fn new(trees: Vec<Phylogeny>) -> Result<Self> {
        let Some(first) = trees.first() else {
            return Err(Error::InvalidArgument("a profile needs at least one tree".into()));
        };
        for t in &trees[1..] {
            first.check_comparable(t)?;
        }
        Ok(Profile { trees })
    }

    pub fn trees(&self) -> &[Phylogeny] {
        &self.trees
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn kind(&self) -> TreeKind {
        self.trees[0].kind()
    }

    pub fn taxa(&self) -> &Arc<TaxonSet> {
        self.trees[0].taxa()
    }

    pub fn is_fully_resolved(&self) -> bool {
        self.trees.iter().all(Phylogeny::is_fully_resolved)
    }
}

/// `Σ_i d^(p)(tree, P_i)`, exactly. Rooted trees use the fast triplet
/// algorithm; unrooted trees enumerate quartets except at `p = 1/2`, where
/// the fast quartet computation is exact.
pub fn profile_distance(tree: &Phylogeny, profile: &Profile, p: &Rational) -> Result<Rational> {
    check_unit_interval(p)?;
    tree.check_comparable(&profile.trees[0])?;
    if tree.kind() == TreeKind::Unrooted && *p == rational(1, 2) {
        let mut total = Rational::zero();
        for member in profile.trees() {
            total += quartet_distance_half(tree, member)?;
        }
        return Ok(total);
    }
    Ok(profile_distance_pair(tree, profile)?.evaluate_unchecked(p))
}

/// Summed distance pair to every profile member.
pub fn profile_distance_pair(tree: &Phylogeny, profile: &Profile) -> Result<DistancePair> {
    let mut total = DistancePair::default();
    for member in profile.trees() {
        total = total
            + match tree.kind() {
                TreeKind::Rooted => parametric_triplet_distance(tree, member)?,
                TreeKind::Unrooted => classify_quartets(tree, member)?.distance_pair(),
            };
    }
    Ok(total)
}

/// The profile member closest to the whole profile.
#[derive(Clone, Debug)]
pub struct BestOfProfile {
    pub index: usize,
    pub tree: Phylogeny,
    pub total: Rational,
    /// Set when `p` lies in `[1/2, 1]`, where the total is at most twice
    /// that of an optimal median.
    pub within_factor_two: bool,
}

/// Picks the member minimizing the profile distance; the lowest index wins ties.
pub fn best_of_profile(profile: &Profile, p: &Rational) -> Result<BestOfProfile> {
    check_unit_interval(p)?;
    let mut best: Option<(usize, Rational)> = None;
    for (i, t) in profile.trees().iter().enumerate() {
        let total = profile_distance(t, profile, p)?;
        if best.as_ref().is_none_or(|(_, b)| total < *b) {
            best = Some((i, total));
        }
    }
    let (index, total) = best.expect("profiles are non-empty");
    Ok(BestOfProfile {
        index,
        tree: profile.trees()[index].clone(),
        total,
        within_factor_two: *p >= rational(1, 2),
    })
}

/// Votes for one way of splitting a polytomy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vote {
    /// Positions of the pulled-out sides among the polytomy's children
    /// (rooted; both entries equal) or neighbors, parent first (unrooted).
    pub parts: (usize, usize),
    /// Member topologies that agree with the split.
    pub agree: u64,
    /// Member topologies resolved the other way.
    pub disagree: u64,
    /// Member topologies that leave the triplet (quartet) unresolved.
    pub abstain: u64,
}

/// Votes of a profile on the triplets (quartets) associated with a polytomy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteTally {
    pub node: NodeId,
    pub votes: Vec<Vote>,
    /// Triplets (quartets) whose leaves lie in distinct sides of the node.
    pub associated: u64,
    /// (member, triplet) pairs where the member resolves the triplet.
    pub resolved_votes: u64,
    /// (member, triplet) pairs where the member does not.
    pub unresolved_votes: u64,
}

impl VoteTally {
    /// Checks that every associated triplet votes once per candidate that
    /// would resolve it: rooted `Σa = 2m`, `Σf = m`, `Σz = 3u`; unrooted
    /// `Σa = 4m`, `Σf = 2m`, `Σz = 6u`, for `m` resolved and `u` unresolved
    /// (member, triplet) pairs.
    pub fn is_conserved(&self, kind: TreeKind) -> bool {
        let f: u64 = self.votes.iter().map(|v| v.agree).sum();
        let a: u64 = self.votes.iter().map(|v| v.disagree).sum();
        let z: u64 = self.votes.iter().map(|v| v.abstain).sum();
        let (m, u) = (self.resolved_votes, self.unresolved_votes);
        match kind {
            TreeKind::Rooted => f == m && a == 2 * m && z == 3 * u,
            TreeKind::Unrooted => f == 2 * m && a == 4 * m && z == 6 * u,
        }
    }
}

/// Taxa in each side of `v`: its children (rooted) or its neighbors with the
/// parent side first (unrooted).
pub(crate) fn polytomy_sides(tree: &Phylogeny, v: NodeId) -> (Vec<NodeId>, Vec<Vec<usize>>) {
    match tree.kind() {
        TreeKind::Rooted => (tree.children(v).to_vec(), tree.children(v).iter().map(|&c| tree.subtree_taxa(c)).collect()),
        TreeKind::Unrooted => {
            let mut sides = tree.neighbor_sides(v);
            if tree.parent(v).is_some() {
                let up = sides.pop().expect("parent side exists");
                sides.insert(0, up);
            }
            (tree.neighbors(v), sides)
        }
    }
}

/// Tallies the votes of the indexed trees at polytomy `v` of `tree`.
pub(crate) fn tally_indexed(tree: &Phylogeny, v: NodeId, members: &[LeafIndex]) -> VoteTally {
    let (_, sides) = polytomy_sides(tree, v);
    let d = sides.len();
    let mut tally = VoteTally { node: v, votes: Vec::new(), associated: 0, resolved_votes: 0, unresolved_votes: 0 };
    match tree.kind() {
        TreeKind::Rooted => {
            tally.votes = (0..d).map(|q| Vote { parts: (q, q), agree: 0, disagree: 0, abstain: 0 }).collect();
            for q in 0..d {
                for r in q + 1..d {
                    for s in r + 1..d {
                        for &x in &sides[q] {
                            for &y in &sides[r] {
                                for &z in &sides[s] {
                                    let mut leaves = [(x, q), (y, r), (z, s)];
                                    leaves.sort_unstable();
                                    tally.associated += 1;
                                    for idx in members {
                                        match idx.triplet(leaves[0].0, leaves[1].0, leaves[2].0).outgroup() {
                                            Some(out) => {
                                                tally.resolved_votes += 1;
                                                for (i, &(_, side)) in leaves.iter().enumerate() {
                                                    if i == out {
                                                        tally.votes[side].agree += 1;
                                                    } else {
                                                        tally.votes[side].disagree += 1;
                                                    }
                                                }
                                            }
                                            None => {
                                                tally.unresolved_votes += 1;
                                                for &(_, side) in &leaves {
                                                    tally.votes[side].abstain += 1;
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        TreeKind::Unrooted => {
            tally.votes = (0..d)
                .flat_map(|q| (q + 1..d).map(move |r| Vote { parts: (q, r), agree: 0, disagree: 0, abstain: 0 }))
                .collect();
            // Position of the pair (q, r), q < r, in the lexicographic list above.
            let slot = |q: usize, r: usize| q * d - q * (q + 1) / 2 + (r - q - 1);
            for_each_cross_quartet(&sides, |mut leaves| {
                leaves.sort_unstable();
                tally.associated += 1;
                for idx in members {
                    let topo = idx.quartet(leaves[0].0, leaves[1].0, leaves[2].0, leaves[3].0);
                    let partner = topo.partner_of_first();
                    match partner {
                        Some(_) => tally.resolved_votes += 1,
                        None => tally.unresolved_votes += 1,
                    }
                    for i in 0..4 {
                        for j in i + 1..4 {
                            let vote = &mut tally.votes[slot(leaves[i].1.min(leaves[j].1), leaves[i].1.max(leaves[j].1))];
                            match partner {
                                None => vote.abstain += 1,
                                Some(p) if (i == 0 && j == p) || (i != 0 && i != p && j != p) => vote.agree += 1,
                                Some(_) => vote.disagree += 1,
                            }
                        }
                    }
                }
            });
        }
    }
    tally
}

/// Calls `f` with every four taxa from four distinct sides, tagged with
/// their side index.
fn for_each_cross_quartet(sides: &[Vec<usize>], mut f: impl FnMut([(usize, usize); 4])) {
    let d = sides.len();
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                for e in c + 1..d {
                    for &w in &sides[a] {
                        for &x in &sides[b] {
                            for &y in &sides[c] {
                                for &z in &sides[e] {
                                    f([(w, a), (x, b), (y, c), (z, e)]);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Vote tally of a whole profile at polytomy `v` of `tree`.
pub fn tally_votes(tree: &Phylogeny, v: NodeId, profile: &Profile) -> Result<VoteTally> {
    tree.check_comparable(&profile.trees[0])?;
    if v >= tree.node_count() || !tree.is_unresolved(v) {
        return Err(Error::Precondition { node: v, message: "votes are taken at unresolved nodes".into() });
    }
    let members: Vec<LeafIndex> = profile.trees().iter().map(LeafIndex::new).collect();
    Ok(tally_indexed(tree, v, &members))
}

/// Applies the split a vote describes.
pub(crate) fn apply_split(tree: &Phylogeny, v: NodeId, parts: (usize, usize)) -> Result<Phylogeny> {
    let (nodes, _) = polytomy_sides(tree, v);
    match tree.kind() {
        TreeKind::Rooted => tree.pull_out(nodes[parts.0]),
        TreeKind::Unrooted => tree.pull_2_out(nodes[parts.0], nodes[parts.1]),
    }
}

/// One refinement step of [`greedy_refine_median`].
#[derive(Clone, Debug)]
pub struct GreedyStep {
    pub vote: Vote,
    /// Change of the profile distance caused by this step.
    pub change: Rational,
    pub distance_after: Rational,
}

#[derive(Clone, Debug)]
pub struct GreedyRefinement {
    pub tree: Phylogeny,
    pub initial_distance: Rational,
    pub final_distance: Rational,
    pub steps: Vec<GreedyStep>,
    /// Set when `p >= 2/3` and every profile member is fully resolved, in
    /// which case no step increases the profile distance.
    pub guaranteed: bool,
}

/// Resolves `tree` completely, one polytomy split at a time.
///
/// At the first unresolved node in preorder, every candidate split is
/// scored by its exact effect on the profile distance: each agreeing
/// member topology saves `p`, each disagreeing one costs `1 - p` and each
/// abstaining one costs `p`. The split with the largest saving is applied;
/// ties go to the lexicographically smallest candidate.
pub fn greedy_refine_median(tree: &Phylogeny, profile: &Profile, p: &Rational) -> Result<GreedyRefinement> {
    check_unit_interval(p)?;
    tree.check_comparable(&profile.trees[0])?;
    let members: Vec<LeafIndex> = profile.trees().iter().map(LeafIndex::new).collect();
    let initial_distance = profile_distance(tree, profile, p)?;
    let mut current = tree.clone();
    let mut distance = initial_distance.clone();
    let mut steps = Vec::new();
    let one = Rational::one();
    let int = |x: u64| Rational::from_integer(BigInt::from(x));
    loop {
        let Some(v) = current.unresolved_nodes().next() else { break };
        let tally = tally_indexed(&current, v, &members);
        let mut best: Option<(Rational, Vote)> = None;
        for vote in tally.votes {
            let saving = p * int(vote.agree) - (&one - p) * int(vote.disagree) - p * int(vote.abstain);
            if best.as_ref().is_none_or(|(b, _)| saving > *b) {
                best = Some((saving, vote));
            }
        }
        let (saving, vote) = best.expect("a polytomy has candidate splits");
        current = apply_split(&current, v, vote.parts)?;
        distance -= &saving;
        steps.push(GreedyStep { vote, change: -saving, distance_after: distance.clone() });
    }
    let guaranteed = *p >= rational(2, 3) && profile.is_fully_resolved();
    Ok(GreedyRefinement { tree: current, initial_distance, final_distance: distance, steps, guaranteed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::{align_taxa, parse_newick, write_newick};
    use crate::oracle::{enumerate_phylogenies, median_exhaustive};
    use crate::random::random_tree;
    use crate::rational::integer;
    use crate::tree::is_refinement;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn profile(trees: &[&str], kind: TreeKind) -> Profile {
        let parsed: Vec<Phylogeny> = trees.iter().map(|s| parse_newick(s, kind).unwrap()).collect();
        Profile::new(align_taxa(parsed).unwrap()).unwrap()
    }

    fn tree_over(s: &str, prof: &Profile) -> Phylogeny {
        parse_newick(s, prof.kind()).unwrap().with_taxa(prof.taxa().clone()).unwrap()
    }

    fn three_triplets() -> Profile {
        profile(&["((a,b),c);", "((a,c),b);", "((b,c),a);"], TreeKind::Rooted)
    }

    #[test]
    fn profiles_need_matching_trees() {
        assert!(Profile::new(vec![]).is_err());
        let a = parse_newick("((a,b),c);", TreeKind::Rooted).unwrap();
        let b = parse_newick("((a,b),d);", TreeKind::Rooted).unwrap();
        assert_eq!(Profile::new(vec![a, b]).unwrap_err(), Error::TaxonMismatch);
    }

    #[test]
    fn profile_distance_examples() {
        let prof = three_triplets();
        let fan = tree_over("(a,b,c);", &prof);
        for p in [rational(0, 1), rational(1, 2), rational(2, 3), integer(1)] {
            assert_eq!(profile_distance(&fan, &prof, &p).unwrap(), &p * integer(3));
            let ab_c = tree_over("((a,b),c);", &prof);
            assert_eq!(profile_distance(&ab_c, &prof, &p).unwrap(), integer(2));
        }
        let same = profile(&["((a,b),(c,d));"; 4], TreeKind::Rooted);
        assert_eq!(profile_distance(&same.trees()[0], &same, &rational(1, 2)).unwrap(), integer(0));
    }

    #[test]
    fn unrooted_profile_distance_paths_agree() {
        let prof = profile(&["((a,b),c,(d,e));", "(a,b,c,d,e);", "((a,c),b,(d,e));"], TreeKind::Unrooted);
        let t = tree_over("((a,b),c,d,e);", &prof);
        let half = rational(1, 2);
        assert_eq!(profile_distance(&t, &prof, &half).unwrap(), profile_distance_pair(&t, &prof).unwrap().evaluate(&half).unwrap());
    }

    #[test]
    fn best_of_profile_examples() {
        let prof = three_triplets();
        let best = best_of_profile(&prof, &integer(1)).unwrap();
        assert_eq!((best.index, best.total.clone()), (0, integer(2)));
        assert!(best.within_factor_two);
        let opt = median_exhaustive(&prof, &integer(1)).unwrap();
        assert!(best.total <= opt.total * integer(2));
        let low = best_of_profile(&prof, &rational(1, 3)).unwrap();
        assert!(!low.within_factor_two);
        let same = profile(&["((a,b),c,d);"; 3], TreeKind::Rooted);
        assert_eq!(best_of_profile(&same, &rational(1, 2)).unwrap().total, integer(0));
    }

    #[test]
    fn votes_on_the_fan() {
        let prof = profile(&["((a,b),c);", "((a,b),c);", "((a,c),b);"], TreeKind::Rooted);
        let fan = tree_over("(a,b,c);", &prof);
        let tally = tally_votes(&fan, fan.root(), &prof).unwrap();
        assert!(tally.is_conserved(TreeKind::Rooted));
        assert_eq!(tally.associated, 1);
        assert_eq!(tally.resolved_votes, 3);
        // Pulling out c agrees with two members.
        let c = fan.children(fan.root()).iter().position(|&x| fan.taxon(x) == Some(2)).unwrap();
        assert_eq!((tally.votes[c].agree, tally.votes[c].disagree), (2, 1));
    }

    #[test]
    fn greedy_on_the_fan() {
        let prof = profile(&["((a,b),c);", "((a,b),c);", "((a,c),b);"], TreeKind::Rooted);
        let fan = tree_over("(a,b,c);", &prof);
        let p = rational(2, 3);
        let out = greedy_refine_median(&fan, &prof, &p).unwrap();
        assert_eq!(write_newick(&out.tree), "((a,b),c);");
        assert_eq!(out.initial_distance, integer(2));
        assert_eq!(out.final_distance, integer(1));
        assert_eq!(profile_distance(&out.tree, &prof, &p).unwrap(), out.final_distance);
        assert!(out.guaranteed);
    }

    #[test]
    fn greedy_leaves_binary_trees_alone() {
        let prof = three_triplets();
        let t = tree_over("((a,b),c);", &prof);
        let out = greedy_refine_median(&t, &prof, &integer(1)).unwrap();
        assert!(out.steps.is_empty());
        assert!(out.tree.is_isomorphic(&t));
    }

    #[test]
    fn greedy_steps_track_the_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for kind in [TreeKind::Rooted, TreeKind::Unrooted] {
            for _ in 0..12 {
                let n = rng.random_range(4..8);
                let k = rng.random_range(1..5);
                let members: Vec<Phylogeny> = (0..k).map(|_| random_tree(&mut rng, n, kind, 0.3)).collect();
                let prof = Profile::new(members).unwrap();
                let start = random_tree(&mut rng, n, kind, 0.8);
                for p in [rational(1, 2), rational(2, 3), integer(1)] {
                    let out = greedy_refine_median(&start, &prof, &p).unwrap();
                    assert!(out.tree.is_fully_resolved());
                    assert!(is_refinement(&start, &out.tree).unwrap());
                    assert_eq!(profile_distance(&out.tree, &prof, &p).unwrap(), out.final_distance);
                    let tally = tally_votes(&start, start.unresolved_nodes().next().unwrap_or(0), &prof);
                    if let Ok(t) = tally {
                        assert!(t.is_conserved(kind));
                    }
                }
            }
        }
    }

    #[test]
    fn greedy_never_increases_for_resolved_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in [TreeKind::Rooted, TreeKind::Unrooted] {
            for _ in 0..15 {
                let n = rng.random_range(4..7);
                let k = rng.random_range(1..6);
                let members: Vec<Phylogeny> = (0..k).map(|_| random_tree(&mut rng, n, kind, 0.0)).collect();
                let prof = Profile::new(members).unwrap();
                let start = random_tree(&mut rng, n, kind, 0.9);
                for p in [rational(2, 3), rational(3, 4), integer(1)] {
                    let out = greedy_refine_median(&start, &prof, &p).unwrap();
                    assert!(out.guaranteed);
                    let mut before = out.initial_distance.clone();
                    for step in &out.steps {
                        assert!(step.distance_after <= before);
                        before = step.distance_after.clone();
                    }
                }
            }
        }
    }

    #[test]
    fn threshold_on_the_three_triplets() {
        let prof = three_triplets();
        let trees = enumerate_phylogenies(3, TreeKind::Rooted).unwrap();
        assert_eq!(trees.len(), 4);
        let low = median_exhaustive(&prof, &rational(3, 5)).unwrap();
        assert_eq!(low.trees.len(), 1);
        assert!(!low.trees[0].is_fully_resolved());
        assert_eq!(median_exhaustive(&prof, &rational(2, 3)).unwrap().trees.len(), 4);
        let high = median_exhaustive(&prof, &rational(3, 4)).unwrap();
        assert_eq!(high.trees.len(), 3);
    }
}
