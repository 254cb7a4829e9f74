//! Random partially resolved trees for tests, self-checks and benchmarks.

use std::sync::Arc;

use rand::Rng;

use crate::tree::{NodeId, Phylogeny, RawTree, TaxonSet, TreeKind};

/// A random tree on taxa `1..=n`: a binary tree grown by inserting leaves on
/// uniformly chosen edges, after which each internal edge is contracted
/// independently with probability `contract`.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: TreeKind, contract: f64) -> Phylogeny {
    assert!(n >= 1, "a tree needs at least one taxon");
    let taxa = Arc::new(TaxonSet::numbered(n).expect("n >= 1"));
    let mut raw = RawTree::default();
    let mut parent: Vec<Option<NodeId>> = Vec::new();
    match kind {
        TreeKind::Rooted => {
            raw.root = raw.add_leaf(0);
            parent.push(None);
        }
        TreeKind::Unrooted => {
            let leaves: Vec<NodeId> = (0..n.min(3)).map(|t| raw.add_leaf(t)).collect();
            parent.extend(std::iter::repeat_n(None, leaves.len()));
            raw.root = raw.add_internal(leaves.clone());
            parent.push(None);
            for l in leaves {
                parent[l] = Some(raw.root);
            }
            if n == 1 {
                return Phylogeny::from_children(kind, taxa, vec![vec![]], vec![Some(0)], 0).expect("single leaf");
            }
        }
    }
    let start = if kind == TreeKind::Rooted { 1 } else { 3 };
    for t in start..n {
        let v = match kind {
            TreeKind::Rooted => rng.random_range(0..raw.children.len()),
            // Any node but the handle names the edge to its parent.
            TreeKind::Unrooted => loop {
                let v = rng.random_range(0..raw.children.len());
                if v != raw.root {
                    break v;
                }
            },
        };
        let leaf = raw.add_leaf(t);
        parent.push(None);
        let mid = raw.add_internal(vec![v, leaf]);
        parent.push(parent[v]);
        match parent[v] {
            Some(p) => {
                for c in raw.children[p].iter_mut() {
                    if *c == v {
                        *c = mid;
                    }
                }
            }
            None => raw.root = mid,
        }
        parent[v] = Some(mid);
        parent[leaf] = Some(mid);
    }
    let contracted: Vec<bool> = (0..raw.children.len())
        .map(|v| parent[v].is_some() && raw.taxon[v].is_none() && rng.random_bool(contract.clamp(0.0, 1.0)))
        .collect();
    let mut out = RawTree::default();
    out.root = copy_contracted(&raw, raw.root, &contracted, &mut out);
    out.finish(kind, taxa).expect("contraction keeps trees valid")
}

fn copy_contracted(raw: &RawTree, v: NodeId, contracted: &[bool], out: &mut RawTree) -> NodeId {
    if let Some(t) = raw.taxon[v] {
        return out.add_leaf(t);
    }
    let mut kids = Vec::new();
    collect_kids(raw, v, contracted, out, &mut kids);
    out.add_internal(kids)
}

fn collect_kids(raw: &RawTree, v: NodeId, contracted: &[bool], out: &mut RawTree, kids: &mut Vec<NodeId>) {
    for &c in &raw.children[v] {
        if contracted[c] {
            collect_kids(raw, c, contracted, out, kids);
        } else {
            kids.push(copy_contracted(raw, c, contracted, out));
        }
    }
}

/// A random fully resolved tree.
pub fn random_binary_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: TreeKind) -> Phylogeny {
    random_tree(rng, n, kind, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_trees_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kind in [TreeKind::Rooted, TreeKind::Unrooted] {
            for n in 1..40 {
                for c in [0.0, 0.3, 1.0] {
                    let t = random_tree(&mut rng, n, kind, c);
                    assert!(t.validate().is_empty(), "{kind} n={n} c={c}");
                    assert_eq!(t.n(), n);
                }
            }
        }
    }

    #[test]
    fn contraction_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(random_tree(&mut rng, 20, TreeKind::Rooted, 0.0).is_fully_resolved());
        assert!(random_tree(&mut rng, 20, TreeKind::Unrooted, 0.0).is_fully_resolved());
        assert_eq!(random_tree(&mut rng, 20, TreeKind::Rooted, 1.0).internal_nodes().count(), 1);
        assert_eq!(random_tree(&mut rng, 20, TreeKind::Unrooted, 1.0).internal_nodes().count(), 1);
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_tree(&mut ChaCha8Rng::seed_from_u64(9), 30, TreeKind::Rooted, 0.4);
        let b = random_tree(&mut ChaCha8Rng::seed_from_u64(9), 30, TreeKind::Rooted, 0.4);
        assert_eq!(a.canonical_form(), b.canonical_form());
    }
}
