//! Exact parametric triplet distance in `O(n²)` time.
//!
//! Every resolved triplet `ab|c` of a rooted tree is strictly induced by
//! exactly one internal node `v`: the one where `a` and `b` lie below two
//! different children and `c` lies outside `T(v)`. Sums over pairs of nodes
//! of the two trees then count shared and one-sided triplets, using the
//! leaf-set intersection sizes of every node pair.

use crate::error::{Error, Result};
use crate::oracle::{Classification, DistancePair};
use crate::tree::{NodeId, Phylogeny, TreeKind};

pub(crate) fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

pub(crate) fn choose3(x: u64) -> u64 {
    if x < 3 {
        0
    } else {
        x * (x - 1) * (x - 2) / 6
    }
}

/// `|L(T1(u)) ∩ L(T2(v))|` for every node pair, plus subtree sizes, from
/// which the three complement intersections follow.
#[derive(Clone, Debug)]
pub struct RootedIntersectionTables {
    n: u64,
    m2: usize,
    inter: Vec<u32>,
    size1: Vec<u32>,
    size2: Vec<u32>,
}

impl RootedIntersectionTables {
    /// Fills the table bottom-up in both trees: a pair involving an internal
    /// node of `t1` sums over that node's children, a leaf of `t1` against an
    /// internal node of `t2` sums over the children in `t2`.
    pub fn build(t1: &Phylogeny, t2: &Phylogeny) -> Result<Self> {
        t1.check_comparable(t2)?;
        let (m1, m2) = (t1.node_count(), t2.node_count());
        let mut inter = vec![0u32; m1 * m2];
        for u in t1.nodes().rev() {
            let row = u * m2;
            match t1.taxon(u) {
                Some(t) => {
                    // Ancestors of the matching leaf in t2 contain it.
                    let mut v = Some(t2.leaf_node(t));
                    while let Some(x) = v {
                        inter[row + x] = 1;
                        v = t2.parent(x);
                    }
                }
                None => {
                    for &c in t1.children(u) {
                        // Children have larger ids, so their rows sit after this one.
                        let (head, tail) = inter.split_at_mut(c * m2);
                        for (dst, src) in head[row..row + m2].iter_mut().zip(&tail[..m2]) {
                            *dst += *src;
                        }
                    }
                }
            }
        }
        let size1 = t1.subtree_sizes().into_iter().map(|s| s as u32).collect();
        let size2 = t2.subtree_sizes().into_iter().map(|s| s as u32).collect();
        Ok(RootedIntersectionTables { n: t1.n() as u64, m2, inter, size1, size2 })
    }

    /// `|L(T1(u)) ∩ L(T2(v))|`
    pub fn inter(&self, u: NodeId, v: NodeId) -> u64 {
        u64::from(self.inter[u * self.m2 + v])
    }

    /// `|L(T1(u)) ∩ complement of L(T2(v))|`
    pub fn in_out(&self, u: NodeId, v: NodeId) -> u64 {
        u64::from(self.size1[u]) - self.inter(u, v)
    }

    /// `|complement of L(T1(u)) ∩ L(T2(v))|`
    pub fn out_in(&self, u: NodeId, v: NodeId) -> u64 {
        u64::from(self.size2[v]) - self.inter(u, v)
    }

    /// `|complement of L(T1(u)) ∩ complement of L(T2(v))|`
    pub fn out_out(&self, u: NodeId, v: NodeId) -> u64 {
        self.n + self.inter(u, v) - u64::from(self.size1[u]) - u64::from(self.size2[v])
    }

    pub fn size1(&self, u: NodeId) -> u64 {
        u64::from(self.size1[u])
    }

    pub fn size2(&self, v: NodeId) -> u64 {
        u64::from(self.size2[v])
    }
}

fn require_rooted(t: &Phylogeny) -> Result<()> {
    if t.kind() != TreeKind::Rooted {
        return Err(Error::KindMismatch { expected: TreeKind::Rooted, found: t.kind() });
    }
    Ok(())
}

/// Number of resolved and unresolved triplets of a rooted tree, in `O(n)`.
pub fn count_resolved_unresolved(tree: &Phylogeny) -> Result<(u64, u64)> {
    require_rooted(tree)?;
    let n = tree.n() as u64;
    let size = tree.subtree_sizes();
    let mut resolved = 0u64;
    for v in tree.internal_nodes().filter(|&v| v != tree.root()) {
        let alpha = size[v] as u64;
        let beta = n - alpha;
        let same_child: u64 = tree.children(v).iter().map(|&x| choose2(size[x] as u64)).sum();
        resolved += (choose2(alpha) - same_child) * beta;
    }
    Ok((resolved, choose3(n) - resolved))
}

fn internal_non_root(t: &Phylogeny) -> Vec<NodeId> {
    t.internal_nodes().filter(|&v| v != t.root()).collect()
}

/// Number of triplets resolved identically in both trees.
pub fn count_shared(t1: &Phylogeny, t2: &Phylogeny, tables: &RootedIntersectionTables) -> u64 {
    let us = internal_non_root(t1);
    let vs = internal_non_root(t2);
    let mut total = 0u64;
    for &u in &us {
        let cu = t1.children(u);
        for &v in &vs {
            let outside = tables.out_out(u, v);
            if outside == 0 {
                continue;
            }
            let cv = t2.children(v);
            // Pairs below both u and v that are split by u and by v.
            let mut pairs = choose2(tables.inter(u, v)) as i64;
            for &x in cu {
                pairs -= choose2(tables.inter(x, v)) as i64;
                for &y in cv {
                    pairs += choose2(tables.inter(x, y)) as i64;
                }
            }
            for &y in cv {
                pairs -= choose2(tables.inter(u, y)) as i64;
            }
            total += pairs as u64 * outside;
        }
    }
    total
}

/// Triplets `{a, b, c}` with `a, b` below `w` in `t1`, `c` outside `T1(u)`,
/// and all three below distinct children of `v` in `t2`.
fn gamma(t2: &Phylogeny, tables: &RootedIntersectionTables, u: NodeId, w: NodeId, v: NodeId) -> i64 {
    let a = tables.inter(w, v) as i64;
    let b = tables.out_in(u, v) as i64;
    let mut n2 = 0i64;
    let mut n3 = 0i64;
    let mut n4 = 0i64;
    for &x in t2.children(v) {
        let ax = tables.inter(w, x) as i64;
        let bx = tables.out_in(u, x) as i64;
        let pairs = ax * (ax - 1) / 2;
        n2 += pairs * bx;
        n3 += pairs * (b - bx);
        n4 += ax * bx * (a - ax);
    }
    a * (a - 1) / 2 * b - n2 - n3 - n4
}

/// Number of triplets resolved in `t1` and unresolved in `t2`.
pub fn count_r1(t1: &Phylogeny, t2: &Phylogeny, tables: &RootedIntersectionTables) -> u64 {
    let us = internal_non_root(t1);
    let vs: Vec<NodeId> = t2.unresolved_nodes().collect();
    let mut total = 0i64;
    for &u in &us {
        for &v in &vs {
            let mut r = gamma(t2, tables, u, u, v);
            for &x in t1.children(u) {
                r -= gamma(t2, tables, u, x, v);
            }
            total += r;
        }
    }
    total as u64
}

/// All five class counts between two rooted trees in `O(n²)`.
pub fn triplet_classification(t1: &Phylogeny, t2: &Phylogeny) -> Result<Classification> {
    require_rooted(t1)?;
    require_rooted(t2)?;
    let tables = RootedIntersectionTables::build(t1, t2)?;
    let (res1, unres1) = count_resolved_unresolved(t1)?;
    let (_, unres2) = count_resolved_unresolved(t2)?;
    let s = count_shared(t1, t2, &tables);
    let r1 = count_r1(t1, t2, &tables);
    let d = res1 - s - r1;
    let u = unres2 - r1;
    let r2 = unres1 - u;
    Ok(Classification { s, d, r1, r2, u })
}

/// Exact parametric triplet distance `(|D|, |R1| + |R2|)`.
pub fn parametric_triplet_distance(t1: &Phylogeny, t2: &Phylogeny) -> Result<DistancePair> {
    Ok(triplet_classification(t1, t2)?.distance_pair())
}
