//! Parametric quartet distance: an `O(n²)` 2-approximation, exact at `p = 1/2`.
//!
//! An unrooted tree is stored hanging from a handle, so every edge is the
//! edge from some non-handle node `c` up to its parent. Removing it leaves
//! two sides: the leaves below `c` and the rest. A resolved quartet `ab|cd`
//! is strictly induced by exactly two directed edges, one where the pair
//! `ab` splits and one where `cd` splits.

use num::{BigInt, Zero};

use crate::error::{Error, Result};
use crate::oracle::{classify_quartets, DistancePair};
use crate::rational::{check_unit_interval, rational, Rational};
use crate::triplet::{choose2, RootedIntersectionTables};
use crate::tree::{NodeId, Phylogeny, TreeKind};

pub(crate) fn choose4(x: u64) -> u64 {
    if x < 4 {
        0
    } else {
        x * (x - 1) * (x - 2) * (x - 3) / 24
    }
}

/// One side of an edge: the leaves below a node, or all other leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below(NodeId),
    Above(NodeId),
}

/// Sides `T(x, w)` of every neighbor `x` of `w`: each child's subtree, then
/// the complement of `T(w)` when `w` has a parent.
pub fn neighbor_sides(tree: &Phylogeny, w: NodeId) -> Vec<Side> {
    let mut out: Vec<Side> = tree.children(w).iter().map(|&c| Side::Below(c)).collect();
    if tree.parent(w).is_some() {
        out.push(Side::Above(w));
    }
    out
}

/// Intersection sizes of the sides of directed edges of two unrooted trees,
/// derived from the rooted tables of their handle-rooted forms.
#[derive(Clone, Debug)]
pub struct DirectedEdgeTables {
    rooted: RootedIntersectionTables,
    n: u64,
}

impl DirectedEdgeTables {
    pub fn build(t1: &Phylogeny, t2: &Phylogeny) -> Result<Self> {
        require_unrooted(t1)?;
        t1.check_comparable(t2)?;
        Ok(DirectedEdgeTables { rooted: RootedIntersectionTables::build(t1, t2)?, n: t1.n() as u64 })
    }

    /// `|s1 ∩ s2|` for a side `s1` of the first tree and `s2` of the second.
    pub fn meet(&self, s1: Side, s2: Side) -> u64 {
        let t = &self.rooted;
        match (s1, s2) {
            (Side::Below(a), Side::Below(b)) => t.inter(a, b),
            (Side::Below(a), Side::Above(b)) => t.in_out(a, b),
            (Side::Above(a), Side::Below(b)) => t.out_in(a, b),
            (Side::Above(a), Side::Above(b)) => t.out_out(a, b),
        }
    }

    pub fn size1(&self, s: Side) -> u64 {
        match s {
            Side::Below(a) => self.rooted.size1(a),
            Side::Above(a) => self.n - self.rooted.size1(a),
        }
    }

    pub fn size2(&self, s: Side) -> u64 {
        match s {
            Side::Below(b) => self.rooted.size2(b),
            Side::Above(b) => self.n - self.rooted.size2(b),
        }
    }
}

fn require_unrooted(t: &Phylogeny) -> Result<()> {
    if t.kind() != TreeKind::Unrooted {
        return Err(Error::KindMismatch { expected: TreeKind::Unrooted, found: t.kind() });
    }
    Ok(())
}

fn side_size(tree: &Phylogeny, size: &[usize], s: Side) -> u64 {
    match s {
        Side::Below(c) => size[c] as u64,
        Side::Above(c) => (tree.n() - size[c]) as u64,
    }
}

/// Number of resolved and unresolved quartets of an unrooted tree, in `O(n)`:
/// half the sum over directed edges `(u, v)` of the pairs split at `u` on
/// `u`'s side times the pairs on `v`'s side.
pub fn count_resolved_unresolved_quartets(tree: &Phylogeny) -> Result<(u64, u64)> {
    require_unrooted(tree)?;
    let n = tree.n() as u64;
    let size = tree.subtree_sizes();
    let mut twice = 0u64;
    for u in tree.internal_nodes() {
        let sides: Vec<u64> = neighbor_sides(tree, u).into_iter().map(|s| side_size(tree, &size, s)).collect();
        let all: u64 = sides.iter().map(|&s| choose2(s)).sum();
        for &sv in &sides {
            let near = n - sv;
            twice += (choose2(near) - (all - choose2(sv))) * choose2(sv);
        }
    }
    let resolved = twice / 2;
    Ok((resolved, choose4(n) - resolved))
}

/// How the shared-quartet count is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SharedMethod {
    /// Enumerate all quartets, `O(n⁴)`.
    Brute,
    /// Inclusion-exclusion over pairs of internal nodes, `O(n²)`.
    Fast,
}

/// Number of quartets resolved identically in both trees.
pub fn count_shared_quartets(t1: &Phylogeny, t2: &Phylogeny, method: SharedMethod) -> Result<u64> {
    match method {
        SharedMethod::Brute => Ok(classify_quartets(t1, t2)?.s),
        SharedMethod::Fast => {
            let tables = DirectedEdgeTables::build(t1, t2)?;
            Ok(shared_fast(t1, t2, &tables))
        }
    }
}

/// For internal `u1`, `u2` with neighbor sides `S_x`, `S_y`, every pair of
/// directed edges `(u1, v1)`, `(u2, v2)` contributes the pairs on the near
/// sides that are split at both `u1` and `u2`, times the pairs on both far
/// sides. Each shared quartet is seen from its two pairs, hence the halving.
fn shared_fast(t1: &Phylogeny, t2: &Phylogeny, tables: &DirectedEdgeTables) -> u64 {
    let n = t1.n() as i64;
    let c2 = |x: i64| x * (x - 1) / 2;
    let nodes2: Vec<(NodeId, Vec<Side>)> = t2.internal_nodes().map(|w| (w, neighbor_sides(t2, w))).collect();
    let mut twice = 0i64;
    for u1 in t1.internal_nodes() {
        let s1 = neighbor_sides(t1, u1);
        let size1: Vec<i64> = s1.iter().map(|&s| tables.size1(s) as i64).collect();
        for (_, s2) in &nodes2 {
            let size2: Vec<i64> = s2.iter().map(|&s| tables.size2(s) as i64).collect();
            let (d1, d2) = (s1.len(), s2.len());
            let mut meet = vec![0i64; d1 * d2];
            for (i, &a) in s1.iter().enumerate() {
                for (j, &b) in s2.iter().enumerate() {
                    meet[i * d2 + j] = tables.meet(a, b) as i64;
                }
            }
            // m[x][y] = C(|S_x ∩ S_y|, 2), g[x][y] = C(|S_x \ S_y|, 2), h[x][y] = C(|S_y \ S_x|, 2)
            let mut m_row = vec![0i64; d1];
            let mut m_col = vec![0i64; d2];
            let mut g_col = vec![0i64; d2];
            let mut h_row = vec![0i64; d1];
            let mut m_all = 0i64;
            for i in 0..d1 {
                for j in 0..d2 {
                    let k = meet[i * d2 + j];
                    let m = c2(k);
                    m_row[i] += m;
                    m_col[j] += m;
                    m_all += m;
                    g_col[j] += c2(size1[i] - k);
                    h_row[i] += c2(size2[j] - k);
                }
            }
            for i in 0..d1 {
                for j in 0..d2 {
                    let k = meet[i * d2 + j];
                    let far = c2(k);
                    if far == 0 {
                        continue;
                    }
                    let near_both = n - size1[i] - size2[j] + k;
                    // Sides x != i of u1 met with the near side of (u2, v2): |S_x| - |S_x ∩ S_j|.
                    let same_x = g_col[j] - c2(size1[i] - k);
                    let same_y = h_row[i] - c2(size2[j] - k);
                    let same_xy = m_all - m_row[i] - m_col[j] + far;
                    let split = c2(near_both) - same_x - same_y + same_xy;
                    twice += split * far;
                }
            }
        }
    }
    (twice / 2) as u64
}

/// Quartets `{a, b} ⊆ P`, `{c, d} ⊆ Q` whose four leaves lie in four
/// distinct neighbor sides of `w` in the second tree. `p` and `q` list the
/// intersections of `P` and `Q` with those sides.
fn gamma(p: &[i64], q: &[i64]) -> i64 {
    let c2 = |x: i64| x * (x - 1) / 2;
    let big_p: i64 = p.iter().sum();
    let big_q: i64 = q.iter().sum();
    let alpha: i64 = p.iter().map(|&x| c2(x)).sum();
    let beta: i64 = p.iter().zip(q).map(|(&a, &b)| a * b).sum();
    let (mut n1, mut n2, mut n3_pairs, mut n3_cross, mut n4) = (0i64, 0i64, 0i64, 0i64, 0i64);
    for (&pi, &qi) in p.iter().zip(q) {
        n1 += c2(pi) * c2(qi);
        n2 += c2(pi) * qi * (big_q - qi) + c2(qi) * pi * (big_p - pi);
        n3_pairs += (alpha - c2(pi)) * c2(qi);
        n3_cross += (beta - pi * qi) * pi * qi;
        n4 += c2(pi) * c2(big_q - qi) + c2(qi) * c2(big_p - pi) + pi * qi * (big_p - pi) * (big_q - qi);
    }
    let n3 = n3_pairs + n3_cross / 2;
    n4 -= 2 * n3;
    c2(big_p) * c2(big_q) - n1 - n2 - n3 - n4
}

/// Quartets strictly induced by the directed edge `(u, v)` of the first tree
/// (given by `u`'s side and `v`'s side plus `u`'s other neighbor sides) and
/// unresolved at `w` in the second tree.
fn r1_term(tables: &DirectedEdgeTables, near: Side, far: Side, others: &[Side], w_sides: &[Side]) -> i64 {
    let q: Vec<i64> = w_sides.iter().map(|&s| tables.meet(far, s) as i64).collect();
    let p: Vec<i64> = w_sides.iter().map(|&s| tables.meet(near, s) as i64).collect();
    let mut r = gamma(&p, &q);
    for &x in others {
        let px: Vec<i64> = w_sides.iter().map(|&s| tables.meet(x, s) as i64).collect();
        r -= gamma(&px, &q);
    }
    r
}

/// The value `y` with `|R1| <= y <= 2|R1|`: the sum over the edges from
/// internal non-handle nodes up to their parents, each a directed edge
/// pointing at the handle, of the quartets it strictly induces that are
/// unresolved in the second tree.
pub fn approx_r1_quartets(t1: &Phylogeny, t2: &Phylogeny, tables: &DirectedEdgeTables) -> u64 {
    let unresolved: Vec<Vec<Side>> = t2.unresolved_nodes().map(|w| neighbor_sides(t2, w)).collect();
    let mut total = 0i64;
    for u in t1.internal_nodes().filter(|&u| u != t1.root()) {
        let others: Vec<Side> = t1.children(u).iter().map(|&c| Side::Below(c)).collect();
        for w_sides in &unresolved {
            total += r1_term(tables, Side::Below(u), Side::Above(u), &others, w_sides);
        }
    }
    total as u64
}

/// The same sum over every directed edge out of an internal node, which
/// counts each quartet in `R1` exactly twice.
pub fn r1_quartets_all_edges(t1: &Phylogeny, t2: &Phylogeny, tables: &DirectedEdgeTables) -> u64 {
    let unresolved: Vec<Vec<Side>> = t2.unresolved_nodes().map(|w| neighbor_sides(t2, w)).collect();
    let mut total = 0i64;
    for u in t1.internal_nodes() {
        let sides = neighbor_sides(t1, u);
        for (i, &far) in sides.iter().enumerate() {
            let others: Vec<Side> = sides.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &s)| s).collect();
            let near = match far {
                Side::Below(c) => Side::Above(c),
                Side::Above(c) => Side::Below(c),
            };
            for w_sides in &unresolved {
                total += r1_term(tables, near, far, &others, w_sides);
            }
        }
    }
    total as u64
}

/// How [`parametric_quartet_distance`] computes its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuartetMethod {
    /// Exact classification of all quartets.
    Brute,
    /// The `O(n²)` approximation; only the shared count may be brute force.
    Approx(SharedMethod),
}

/// A value `x` with `d <= x <= 2d`, so the true distance lies in `[x/2, x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxDistance {
    pub value: Rational,
    pub low: Rational,
    pub high: Rational,
    /// True when `value` is the distance itself.
    pub exact: bool,
}

impl ApproxDistance {
    fn exact(value: Rational) -> Self {
        ApproxDistance { low: value.clone(), high: value.clone(), value, exact: true }
    }
}

/// Parametric quartet distance at `p`.
///
/// With [`QuartetMethod::Approx`] the result is exact at `p = 1/2` and a
/// 2-approximation for `p` in `(1/2, 1]`; smaller `p` is refused.
pub fn parametric_quartet_distance(
    t1: &Phylogeny,
    t2: &Phylogeny,
    p: &Rational,
    method: QuartetMethod,
) -> Result<ApproxDistance> {
    check_unit_interval(p)?;
    require_unrooted(t1)?;
    t1.check_comparable(t2)?;
    let half = rational(1, 2);
    let shared = match method {
        QuartetMethod::Brute => {
            let d = classify_quartets(t1, t2)?.distance_pair();
            return Ok(ApproxDistance::exact(d.evaluate(p)?));
        }
        QuartetMethod::Approx(shared) => shared,
    };
    if *p < half {
        return Err(Error::UnsupportedGuarantee(crate::rational::format_rational(p)));
    }
    let tables = DirectedEdgeTables::build(t1, t2)?;
    let (res1, unres1) = count_resolved_unresolved_quartets(t1)?;
    let (_, unres2) = count_resolved_unresolved_quartets(t2)?;
    let s = match shared {
        SharedMethod::Brute => classify_quartets(t1, t2)?.s,
        SharedMethod::Fast => shared_fast(t1, t2, &tables),
    };
    let int = |x: i64| Rational::from_integer(BigInt::from(x));
    let base = int(res1 as i64 - s as i64) + p * int(unres1 as i64 - unres2 as i64);
    if *p == half {
        return Ok(ApproxDistance::exact(base));
    }
    let y = approx_r1_quartets(t1, t2, &tables);
    let value = base + (p * int(2) - int(1)) * int(y as i64);
    Ok(ApproxDistance { low: &value / int(2), high: value.clone(), value, exact: false })
}

/// Exact distance pair from the brute-force classification.
pub fn quartet_distance_pair(t1: &Phylogeny, t2: &Phylogeny) -> Result<DistancePair> {
    Ok(classify_quartets(t1, t2)?.distance_pair())
}

/// Exact `d^(1/2)` in `O(n²)`.
pub fn quartet_distance_half(t1: &Phylogeny, t2: &Phylogeny) -> Result<Rational> {
    let d = parametric_quartet_distance(t1, t2, &rational(1, 2), QuartetMethod::Approx(SharedMethod::Fast))?;
    debug_assert!(d.exact && d.value >= Rational::zero());
    Ok(d.value)
}
