//! Bounds on the Hausdorff triplet and quartet distances.
//!
//! The exact Hausdorff distance ranges over all full refinements of both
//! trees and is only available through the enumeration in [`crate::oracle`].
//! Here it is bracketed by quantities computable from a classification.

use num::{BigInt, Signed};

use crate::consensus::{apply_split, tally_indexed};
use crate::error::{Error, Result};
use crate::oracle::{classify_quartets, Classification, LeafIndex};
use crate::rational::{rational, Rational};
use crate::tree::{NodeId, Phylogeny, TreeKind};
use crate::triplet::triplet_classification;

/// `lower = |D| + (2/3)·max(|R1|, |R2|)` and `upper = |D| + |R1| + |R2| + |U|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HausdorffBounds {
    pub lower: Rational,
    pub upper: u64,
    pub classification: Classification,
}

/// Classification by the fast triplet path (rooted) or by enumerating
/// quartets (unrooted).
pub fn classification(t1: &Phylogeny, t2: &Phylogeny) -> Result<Classification> {
    match t1.kind() {
        TreeKind::Rooted => triplet_classification(t1, t2),
        TreeKind::Unrooted => classify_quartets(t1, t2),
    }
}

pub fn hausdorff_bounds(t1: &Phylogeny, t2: &Phylogeny) -> Result<HausdorffBounds> {
    let c = classification(t1, t2)?;
    Ok(bounds_from(c))
}

pub fn bounds_from(c: Classification) -> HausdorffBounds {
    let lower = Rational::from_integer(BigInt::from(c.d)) + rational(2, 3) * Rational::from_integer(BigInt::from(c.r1.max(c.r2)));
    HausdorffBounds { lower, upper: c.d + c.r1 + c.r2 + c.u, classification: c }
}

/// Result of [`adversarial_refinement`].
#[derive(Clone, Debug)]
pub struct AdversarialRefinement {
    /// A refinement of the first tree with nothing left in `R2`.
    pub tree: Phylogeny,
    /// `|D|` between the refined tree and the second tree.
    pub disagreements: u64,
    /// Classification of the original pair.
    pub initial: Classification,
    pub steps: usize,
}

/// Refines the first tree one split at a time, always choosing a split that
/// resolves at least twice as many triplets (quartets) against the second
/// tree as along it. The final `|D|` is a lower bound on the directed
/// Hausdorff term and is at least `|D| + (2/3)|R2|` of the original pair.
pub fn adversarial_refinement(t1: &Phylogeny, t2: &Phylogeny) -> Result<AdversarialRefinement> {
    let initial = classification(t1, t2)?;
    let index2 = LeafIndex::new(t2);
    let mut tree = t1.clone();
    let mut steps = 0;
    'refine: loop {
        let polytomies: Vec<NodeId> = tree.unresolved_nodes().collect();
        for v in polytomies {
            let tally = tally_indexed(&tree, v, std::slice::from_ref(&index2));
            if tally.resolved_votes == 0 {
                continue;
            }
            let (choice, _) = tally
                .votes
                .iter()
                .enumerate()
                .filter(|(_, c)| c.agree + c.disagree > 0 && c.disagree >= 2 * c.agree)
                .map(|(i, c)| (i, c.disagree as i64 - 2 * c.agree as i64))
                .fold(None::<(usize, i64)>, |best, (i, gain)| match best {
                    Some((_, g)) if g >= gain => best,
                    _ => Some((i, gain)),
                })
                .ok_or_else(|| Error::InvalidArgument("no admissible split found".into()))?;
            tree = apply_split(&tree, v, tally.votes[choice].parts)?;
            steps += 1;
            continue 'refine;
        }
        break;
    }
    let disagreements = classification(&tree, t2)?.d;
    Ok(AdversarialRefinement { tree, disagreements, initial, steps })
}

/// Outcome of [`equivalence_certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceCertificate {
    /// `|U| <= beta·(|D| + |R1| + |R2|)`.
    pub holds: bool,
    /// `3 + 3·beta`, bounding the Hausdorff distance by that multiple of
    /// `d^(2/3)` when the certificate holds.
    pub factor: Option<Rational>,
    pub classification: Classification,
}

pub fn equivalence_certificate(t1: &Phylogeny, t2: &Phylogeny, beta: &Rational) -> Result<EquivalenceCertificate> {
    if !beta.is_positive() {
        return Err(Error::OutOfRange(format!("beta = {beta} must be positive")));
    }
    let c = classification(t1, t2)?;
    let int = |x: u64| Rational::from_integer(BigInt::from(x));
    let holds = int(c.u) <= beta * int(c.d + c.r1 + c.r2);
    let factor = holds.then(|| int(3) + int(3) * beta);
    Ok(EquivalenceCertificate { holds, factor, classification: c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::{parse_newick, write_newick};
    use crate::oracle::{classify, enumerate_phylogenies, hausdorff_exact};
    use crate::random::random_tree;
    use crate::rational::integer;
    use crate::tree::is_refinement;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair(a: &str, b: &str, kind: TreeKind) -> (Phylogeny, Phylogeny) {
        let t1 = parse_newick(a, kind).unwrap();
        let t2 = parse_newick(b, kind).unwrap().with_taxa(t1.taxa().clone()).unwrap();
        (t1, t2)
    }

    #[test]
    fn bounds_examples() {
        let (fan, ab_c) = pair("(a,b,c);", "((a,b),c);", TreeKind::Rooted);
        let b = hausdorff_bounds(&fan, &ab_c).unwrap();
        assert_eq!((b.lower.clone(), b.upper), (rational(2, 3), 1));
        let exact = hausdorff_exact(&fan, &ab_c, 100).unwrap();
        assert!(b.lower <= integer(exact as i64) && exact <= b.upper);

        let (t, same) = pair("((a,b),(c,d));", "((a,b),(c,d));", TreeKind::Rooted);
        let b = hausdorff_bounds(&t, &same).unwrap();
        assert_eq!((b.lower, b.upper), (integer(0), 0));

        let (t1, t2) = pair("((a,b),(c,d));", "((a,c),(b,d));", TreeKind::Rooted);
        let b = hausdorff_bounds(&t1, &t2).unwrap();
        assert_eq!((b.lower, b.upper), (integer(4), 4));
    }

    #[test]
    fn bounds_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [TreeKind::Rooted, TreeKind::Unrooted] {
            for _ in 0..10 {
                let t1 = random_tree(&mut rng, 9, kind, 0.5);
                let t2 = random_tree(&mut rng, 9, kind, 0.5);
                let a = hausdorff_bounds(&t1, &t2).unwrap();
                let b = hausdorff_bounds(&t2, &t1).unwrap();
                assert_eq!((a.lower, a.upper), (b.lower, b.upper));
            }
        }
    }

    #[test]
    fn adversarial_fan_against_cherry() {
        let (fan, ab_c) = pair("(a,b,c);", "((a,b),c);", TreeKind::Rooted);
        let out = adversarial_refinement(&fan, &ab_c).unwrap();
        let text = write_newick(&out.tree);
        assert!(text == "((a,c),b);" || text == "(a,(b,c));", "{text}");
        assert_eq!(out.disagreements, 1);
        assert_eq!(out.steps, 1);
    }

    #[test]
    fn adversarial_leaves_binary_trees_alone() {
        let (t1, t2) = pair("((a,b),(c,d));", "(a,b,c,d);", TreeKind::Rooted);
        let out = adversarial_refinement(&t1, &t2).unwrap();
        assert!(out.tree.is_isomorphic(&t1));
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn adversarial_postconditions_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for kind in [TreeKind::Rooted, TreeKind::Unrooted] {
            for n in 4..=12 {
                let t1 = random_tree(&mut rng, n, kind, 0.6);
                let t2 = random_tree(&mut rng, n, kind, 0.3);
                let out = adversarial_refinement(&t1, &t2).unwrap();
                assert!(is_refinement(&t1, &out.tree).unwrap());
                let after = classify(&out.tree, &t2).unwrap();
                assert_eq!(after.r2, 0);
                assert_eq!(after.d, out.disagreements);
                let c = out.initial;
                assert!(3 * after.d >= 3 * c.d + 2 * c.r2, "{kind} n={n}");
                assert!(out.steps <= t1.n());
            }
        }
    }

    #[test]
    fn sandwich_on_unrooted_five_taxa() {
        let trees = enumerate_phylogenies(5, TreeKind::Unrooted).unwrap();
        for a in trees.iter().step_by(5) {
            for b in trees.iter().step_by(3) {
                let bounds = hausdorff_bounds(a, b).unwrap();
                let exact = hausdorff_exact(a, b, 1 << 20).unwrap();
                assert!(bounds.lower <= integer(exact as i64) && exact <= bounds.upper);
            }
        }
    }

    #[test]
    fn equivalence_certificates() {
        let (b1, b2) = pair("((a,b),(c,d));", "((a,c),(b,d));", TreeKind::Rooted);
        let cert = equivalence_certificate(&b1, &b2, &rational(1, 10)).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.factor, Some(rational(33, 10)));

        let (s1, s2) = pair("(a,b,c,d);", "(a,b,c,d);", TreeKind::Rooted);
        assert!(!equivalence_certificate(&s1, &s2, &integer(1000)).unwrap().holds);

        let (f, c) = pair("(a,b,c,d);", "(((a,b),c),d);", TreeKind::Rooted);
        let cert = equivalence_certificate(&f, &c, &integer(1)).unwrap();
        assert_eq!(cert.classification, Classification { r2: 4, ..Default::default() });
        assert!(cert.holds);
        assert!(equivalence_certificate(&f, &c, &integer(0)).is_err());
    }
}
