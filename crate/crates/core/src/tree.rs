//! Leaf-labelled phylogenies with polytomies.
//!
//! Both rooted and unrooted trees live in the same arena representation.
//! An unrooted tree is stored hanging from a distinguished internal "handle"
//! node; the handle has no semantic meaning beyond giving traversals a start.
//! Node ids are always assigned in preorder from the root (or handle), so
//! `parent(v) < v` for every non-root node and iterating ids in reverse
//! visits children before their parents.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Whether a tree carries a root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeKind {
    Rooted,
    Unrooted,
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeKind::Rooted => f.write_str("rooted"),
            TreeKind::Unrooted => f.write_str("unrooted"),
        }
    }
}

/// An ordered set of unique taxon labels. Taxa are referred to by their
/// position in this set everywhere else in the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaxonSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl TaxonSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidArgument("a taxon set needs at least one label".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel(0));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(TaxonSet { labels, index })
    }

    /// The taxon set `{1, ..., n}` with label `i + 1` at index `i`.
    pub fn numbered(n: usize) -> Result<Self> {
        TaxonSet::new((1..=n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, taxon: usize) -> &str {
        &self.labels[taxon]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// True when both sets hold the same labels, in any order.
    pub fn same_labels(&self, other: &TaxonSet) -> bool {
        self.len() == other.len() && self.labels.iter().all(|l| other.index.contains_key(l))
    }
}

/// Shape of a tree restricted to three taxa `a < b < c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TripletTopology {
    /// `a|bc`
    OutA,
    /// `b|ac`
    OutB,
    /// `c|ab`
    OutC,
    Fan,
}

impl TripletTopology {
    pub fn is_resolved(self) -> bool {
        self != TripletTopology::Fan
    }

    /// Topology of the sorted triplet whose outgroup is `sorted[pos]`.
    pub fn with_outgroup(pos: usize) -> Self {
        match pos {
            0 => TripletTopology::OutA,
            1 => TripletTopology::OutB,
            2 => TripletTopology::OutC,
            _ => panic!("outgroup position out of range"),
        }
    }

    /// Position (0, 1 or 2) of the outgroup, if resolved.
    pub fn outgroup(self) -> Option<usize> {
        match self {
            TripletTopology::OutA => Some(0),
            TripletTopology::OutB => Some(1),
            TripletTopology::OutC => Some(2),
            TripletTopology::Fan => None,
        }
    }
}

/// Shape of an unrooted tree restricted to four taxa `a < b < c < d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuartetTopology {
    /// `ab|cd`
    AbCd,
    /// `ac|bd`
    AcBd,
    /// `ad|bc`
    AdBc,
    Star,
}

impl QuartetTopology {
    pub fn is_resolved(self) -> bool {
        self != QuartetTopology::Star
    }

    /// Topology pairing `sorted[0]` with `sorted[partner]`.
    pub fn pairing_first_with(partner: usize) -> Self {
        match partner {
            1 => QuartetTopology::AbCd,
            2 => QuartetTopology::AcBd,
            3 => QuartetTopology::AdBc,
            _ => panic!("quartet partner position out of range"),
        }
    }

    /// Position (1, 2 or 3) of the taxon paired with `sorted[0]`, if resolved.
    pub fn partner_of_first(self) -> Option<usize> {
        match self {
            QuartetTopology::AbCd => Some(1),
            QuartetTopology::AcBd => Some(2),
            QuartetTopology::AdBc => Some(3),
            QuartetTopology::Star => None,
        }
    }
}

/// A structural problem found by [`Phylogeny::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: NodeId,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: {}", self.node, self.message)
    }
}

/// A rooted or unrooted phylogeny over a [`TaxonSet`].
#[derive(Clone, Debug)]
pub struct Phylogeny {
    kind: TreeKind,
    taxa: Arc<TaxonSet>,
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    taxon: Vec<Option<usize>>,
    depth: Vec<u32>,
    leaf: Vec<NodeId>,
}

impl Phylogeny {
    /// Builds a validated tree from child lists. `taxon[v]` names the taxon at
    /// leaf `v`. Ids are renumbered in preorder, so the ids of the result do
    /// not in general match the ids passed in.
    pub fn from_children(
        kind: TreeKind,
        taxa: Arc<TaxonSet>,
        children: Vec<Vec<NodeId>>,
        taxon: Vec<Option<usize>>,
        root: NodeId,
    ) -> Result<Self> {
        let tree = Self::from_children_unchecked(kind, taxa, children, taxon, root)?;
        let violations = tree.validate();
        if let Some(first) = violations.first() {
            return Err(Error::InvalidTree(first.to_string()));
        }
        Ok(tree)
    }

    /// Like [`Phylogeny::from_children`] but only rejects inputs that are not
    /// trees at all (cycles, shared or unreachable nodes, bad ids). The
    /// result may violate the phylogeny invariants; see [`Phylogeny::validate`].
    pub fn from_children_unchecked(
        kind: TreeKind,
        taxa: Arc<TaxonSet>,
        children: Vec<Vec<NodeId>>,
        taxon: Vec<Option<usize>>,
        root: NodeId,
    ) -> Result<Self> {
        let m = children.len();
        if taxon.len() != m || root >= m {
            return Err(Error::InvalidTree("node arrays disagree in length".into()));
        }
        let mut new_id = vec![usize::MAX; m];
        let mut order = Vec::with_capacity(m);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if v >= m {
                return Err(Error::InvalidTree(format!("child id {v} out of range")));
            }
            if new_id[v] != usize::MAX {
                return Err(Error::InvalidTree(format!("node {v} is reachable twice")));
            }
            new_id[v] = order.len();
            order.push(v);
            for &c in children[v].iter().rev() {
                stack.push(c);
            }
        }
        if order.len() != m {
            return Err(Error::InvalidTree(format!(
                "{} nodes are not connected to the root",
                m - order.len()
            )));
        }
        let mut parent = vec![None; m];
        let mut new_children = vec![Vec::new(); m];
        let mut new_taxon = vec![None; m];
        let mut depth = vec![0u32; m];
        for (nv, &old) in order.iter().enumerate() {
            new_taxon[nv] = taxon[old];
            new_children[nv] = children[old].iter().map(|&c| new_id[c]).collect();
            for &c in &new_children[nv] {
                parent[c] = Some(nv);
                depth[c] = depth[nv] + 1;
            }
        }
        let mut leaf = vec![usize::MAX; taxa.len()];
        for (v, t) in new_taxon.iter().enumerate() {
            if let Some(t) = *t {
                if t >= taxa.len() {
                    return Err(Error::InvalidTree(format!("taxon index {t} out of range")));
                }
                leaf[t] = v;
            }
        }
        Ok(Phylogeny {
            kind,
            taxa,
            parent,
            children: new_children,
            taxon: new_taxon,
            depth,
            leaf,
        })
    }

    /// Star (unrooted) or fan (rooted) over all taxa.
    pub fn star(kind: TreeKind, taxa: Arc<TaxonSet>) -> Result<Self> {
        let n = taxa.len();
        if n == 1 {
            return Self::from_children(kind, taxa, vec![vec![]], vec![Some(0)], 0);
        }
        let mut children = vec![(1..=n).collect::<Vec<_>>()];
        let mut taxon = vec![None];
        for t in 0..n {
            children.push(vec![]);
            taxon.push(Some(t));
        }
        Self::from_children(kind, taxa, children, taxon, 0)
    }

    /// Lists every violated invariant. Valid trees yield an empty list.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.taxa.len();
        let mut seen = vec![false; n];
        for v in self.nodes() {
            let nc = self.children[v].len();
            match (nc, self.taxon[v]) {
                (0, None) => out.push(Violation { node: v, message: "leaf without a taxon".into() }),
                (0, Some(t)) => {
                    if seen[t] {
                        out.push(Violation {
                            node: v,
                            message: format!("taxon {:?} appears on more than one leaf", self.taxa.label(t)),
                        });
                    }
                    seen[t] = true;
                }
                (_, Some(_)) => out.push(Violation {
                    node: v,
                    message: "internal node carries a taxon".into(),
                }),
                (_, None) => {}
            }
            if nc == 0 {
                continue;
            }
            match self.kind {
                TreeKind::Rooted => {
                    if nc < 2 {
                        out.push(Violation { node: v, message: "internal node with <2 children".into() });
                    }
                }
                TreeKind::Unrooted => {
                    let degree = self.degree(v);
                    // A two-leaf unrooted tree is a single edge; its handle is allowed degree 2.
                    let two_leaf_handle = v == self.root() && n == 2 && nc == 2;
                    if degree < 3 && !two_leaf_handle {
                        out.push(Violation { node: v, message: "internal node with degree <3".into() });
                    }
                }
            }
        }
        for (t, present) in seen.iter().enumerate() {
            if !present {
                out.push(Violation {
                    node: self.root(),
                    message: format!("taxon {:?} has no leaf", self.taxa.label(t)),
                });
            }
        }
        if self.kind == TreeKind::Unrooted && n >= 2 && self.children[self.root()].is_empty() {
            out.push(Violation { node: self.root(), message: "unrooted handle must be an internal node".into() });
        }
        out
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn taxa(&self) -> &Arc<TaxonSet> {
        &self.taxa
    }

    /// Number of taxa.
    pub fn n(&self) -> usize {
        self.taxa.len()
    }

    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.children.len()
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn taxon(&self, v: NodeId) -> Option<usize> {
        self.taxon[v]
    }

    pub fn depth(&self, v: NodeId) -> u32 {
        self.depth[v]
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.children[v].is_empty()
    }

    /// The leaf node carrying `taxon`.
    pub fn leaf_node(&self, taxon: usize) -> NodeId {
        self.leaf[taxon]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    pub fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.parent[v].into_iter().collect();
        out.extend_from_slice(&self.children[v]);
        out
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&v| !self.is_leaf(v))
    }

    /// A resolved node has two children (rooted) or degree three (unrooted).
    pub fn is_unresolved(&self, v: NodeId) -> bool {
        match self.kind {
            TreeKind::Rooted => self.children[v].len() > 2,
            TreeKind::Unrooted => !self.is_leaf(v) && self.degree(v) > 3,
        }
    }

    pub fn unresolved_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&v| self.is_unresolved(v))
    }

    pub fn is_fully_resolved(&self) -> bool {
        self.unresolved_nodes().next().is_none()
    }

    /// Number of internal edges (edges joining two internal nodes).
    pub fn internal_edge_count(&self) -> usize {
        self.nodes()
            .filter(|&v| !self.is_leaf(v) && self.parent[v].is_some())
            .count()
    }

    /// Number of leaves below each node.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![0usize; self.node_count()];
        for v in self.nodes().rev() {
            size[v] = if self.is_leaf(v) {
                1
            } else {
                self.children[v].iter().map(|&c| size[c]).sum()
            };
        }
        size
    }

    /// Taxa below `v`, in preorder.
    pub fn subtree_taxa(&self, v: NodeId) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            if let Some(t) = self.taxon[x] {
                out.push(t);
            }
            stack.extend(self.children[x].iter().rev());
        }
        out
    }

    /// Taxa on each side of `v`: one group per child, followed by the taxa
    /// outside `T(v)` when `v` has a parent and that side is non-empty.
    pub fn neighbor_sides(&self, v: NodeId) -> Vec<Vec<usize>> {
        let mut sides: Vec<Vec<usize>> = self.children[v].iter().map(|&c| self.subtree_taxa(c)).collect();
        if self.parent[v].is_some() {
            let mut inside = vec![false; self.n()];
            for t in self.subtree_taxa(v) {
                inside[t] = true;
            }
            let outside: Vec<usize> = (0..self.n()).filter(|&t| !inside[t]).collect();
            if !outside.is_empty() {
                sides.push(outside);
            }
        }
        sides
    }

    /// Cluster (leaf set bitset) below every node.
    pub fn clusters(&self) -> Vec<FixedBitSet> {
        let n = self.n();
        let mut out = vec![FixedBitSet::with_capacity(n); self.node_count()];
        for v in self.nodes().rev() {
            if let Some(t) = self.taxon[v] {
                out[v].insert(t);
            } else {
                let mut acc = FixedBitSet::with_capacity(n);
                for &c in &self.children[v] {
                    acc.union_with(&out[c]);
                }
                out[v] = acc;
            }
        }
        out
    }

    pub fn lca(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root node has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root node has a parent");
        }
        while a != b {
            a = self.parent[a].expect("non-root node has a parent");
            b = self.parent[b].expect("non-root node has a parent");
        }
        a
    }

    /// Number of edges on the path between two nodes.
    pub fn path_length(&self, a: NodeId, b: NodeId) -> u32 {
        let l = self.lca(a, b);
        self.depth[a] + self.depth[b] - 2 * self.depth[l]
    }

    fn check_taxa(&self, taxa: &[usize]) -> Result<()> {
        for (i, &t) in taxa.iter().enumerate() {
            if t >= self.n() {
                return Err(Error::UnknownTaxon(t.to_string()));
            }
            if taxa[..i].contains(&t) {
                return Err(Error::InvalidArgument(format!("taxon {t} listed twice")));
            }
        }
        Ok(())
    }

    /// Topology of the triplet, relative to its sorted order. Fan iff the
    /// three pairwise lowest common ancestors coincide.
    pub fn triplet_topology(&self, triplet: [usize; 3]) -> Result<TripletTopology> {
        if self.kind != TreeKind::Rooted {
            return Err(Error::KindMismatch { expected: TreeKind::Rooted, found: self.kind });
        }
        self.check_taxa(&triplet)?;
        let mut t = triplet;
        t.sort_unstable();
        let [a, b, c] = t.map(|x| self.leaf[x]);
        let ab = self.depth[self.lca(a, b)];
        let ac = self.depth[self.lca(a, c)];
        let bc = self.depth[self.lca(b, c)];
        Ok(triplet_from_lca_depths(ab, ac, bc))
    }

    /// Topology of the quartet, relative to its sorted order, read off the
    /// four-point condition on unit edge lengths.
    pub fn quartet_topology(&self, quartet: [usize; 4]) -> Result<QuartetTopology> {
        if self.kind != TreeKind::Unrooted {
            return Err(Error::KindMismatch { expected: TreeKind::Unrooted, found: self.kind });
        }
        self.check_taxa(&quartet)?;
        let mut q = quartet;
        q.sort_unstable();
        let [a, b, c, d] = q.map(|x| self.leaf[x]);
        let s1 = self.path_length(a, b) + self.path_length(c, d);
        let s2 = self.path_length(a, c) + self.path_length(b, d);
        let s3 = self.path_length(a, d) + self.path_length(b, c);
        Ok(quartet_from_path_sums(s1, s2, s3))
    }

    /// The restriction `T|X`: the minimal subtree spanning `subset` with
    /// degree-two nodes suppressed (a rooted tree keeps its root, the lowest
    /// common ancestor of `subset`). Taxa of the result are the subset, in
    /// increasing index order.
    pub fn restrict(&self, subset: &[usize]) -> Result<Phylogeny> {
        if subset.is_empty() {
            return Err(Error::InvalidArgument("cannot restrict to an empty taxon set".into()));
        }
        self.check_taxa(subset)?;
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        let mut new_index = vec![usize::MAX; self.n()];
        for (i, &t) in sorted.iter().enumerate() {
            new_index[t] = i;
        }
        let taxa = Arc::new(TaxonSet::new(sorted.iter().map(|&t| self.taxa.label(t).to_string()))?);

        let mut count = vec![0usize; self.node_count()];
        for v in self.nodes().rev() {
            count[v] = match self.taxon[v] {
                Some(t) => usize::from(new_index[t] != usize::MAX),
                None => self.children[v].iter().map(|&c| count[c]).sum(),
            };
        }
        let mut raw = RawTree::default();
        let root = self.copy_restricted(self.root(), &count, &new_index, &mut raw);
        raw.root = root;
        if self.kind == TreeKind::Unrooted {
            raw.unroot_handle();
        }
        raw.finish(self.kind, taxa)
    }

    fn copy_restricted(&self, v: NodeId, count: &[usize], new_index: &[usize], raw: &mut RawTree) -> usize {
        if let Some(t) = self.taxon[v] {
            return raw.add_leaf(new_index[t]);
        }
        let kept: Vec<NodeId> = self.children[v].iter().copied().filter(|&c| count[c] > 0).collect();
        if kept.len() == 1 {
            return self.copy_restricted(kept[0], count, new_index, raw);
        }
        let kids = kept.into_iter().map(|c| self.copy_restricted(c, count, new_index, raw)).collect();
        raw.add_internal(kids)
    }

    /// Splits the parent `v` of `u` into `v'` (children `u` and `v''`) and
    /// `v''` (the remaining children of `v`).
    pub fn pull_out(&self, u: NodeId) -> Result<Phylogeny> {
        if self.kind != TreeKind::Rooted {
            return Err(Error::KindMismatch { expected: TreeKind::Rooted, found: self.kind });
        }
        let v = self.parent.get(u).copied().flatten().ok_or_else(|| Error::Precondition {
            node: u,
            message: "pull-out needs a non-root node".into(),
        })?;
        if self.children[v].len() < 3 {
            return Err(Error::Precondition {
                node: u,
                message: format!("parent {v} has {} children, pull-out needs at least 3", self.children[v].len()),
            });
        }
        let mut raw = RawTree::from_tree(self);
        let rest: Vec<usize> = self.children[v].iter().copied().filter(|&c| c != u).collect();
        let inner = raw.add_internal(rest);
        raw.children[v] = vec![u, inner];
        raw.finish(self.kind, self.taxa.clone())
    }

    /// Splits `v`, the common neighbor of `u1` and `u2`, into `v'` adjacent to
    /// `u1`, `u2` and `v''`, and `v''` adjacent to every other neighbor of `v`.
    pub fn pull_2_out(&self, u1: NodeId, u2: NodeId) -> Result<Phylogeny> {
        if self.kind != TreeKind::Unrooted {
            return Err(Error::KindMismatch { expected: TreeKind::Unrooted, found: self.kind });
        }
        if u1 == u2 || u1 >= self.node_count() || u2 >= self.node_count() {
            return Err(Error::Precondition { node: u1, message: "pull-2-out needs two distinct nodes".into() });
        }
        let v = self
            .neighbors(u1)
            .into_iter()
            .find(|&w| self.neighbors(u2).contains(&w))
            .ok_or_else(|| Error::Precondition { node: u1, message: format!("{u1} and {u2} share no neighbor") })?;
        if self.degree(v) < 4 {
            return Err(Error::Precondition {
                node: v,
                message: format!("shared neighbor {v} has degree {}, pull-2-out needs at least 4", self.degree(v)),
            });
        }
        let mut raw = RawTree::from_tree(self);
        let parent = self.parent[v];
        if parent == Some(u1) || parent == Some(u2) {
            // v keeps its parent and the other pulled node; the rest moves down.
            let other = if parent == Some(u1) { u2 } else { u1 };
            let rest: Vec<usize> = self.children[v].iter().copied().filter(|&c| c != other).collect();
            let inner = raw.add_internal(rest);
            raw.children[v] = vec![other, inner];
        } else {
            let pulled = raw.add_internal(vec![u1, u2]);
            let mut kids: Vec<usize> = self.children[v].iter().copied().filter(|&c| c != u1 && c != u2).collect();
            kids.push(pulled);
            raw.children[v] = kids;
        }
        raw.finish(self.kind, self.taxa.clone())
    }

    /// Contracts the internal edge between `v` and its parent.
    pub fn contract_edge(&self, v: NodeId) -> Result<Phylogeny> {
        let p = self.parent.get(v).copied().flatten().ok_or_else(|| Error::Precondition {
            node: v,
            message: "cannot contract above the root".into(),
        })?;
        if self.is_leaf(v) {
            return Err(Error::Precondition { node: v, message: "cannot contract a leaf edge".into() });
        }
        let mut raw = RawTree::from_tree(self);
        let mut kids = Vec::new();
        for &c in &self.children[p] {
            if c == v {
                kids.extend_from_slice(&self.children[v]);
            } else {
                kids.push(c);
            }
        }
        raw.children[p] = kids;
        raw.children[v].clear();
        raw.drop_node(v);
        raw.finish(self.kind, self.taxa.clone())
    }

    /// Re-hangs an unrooted tree from another internal node.
    pub fn reroot(&self, handle: NodeId) -> Result<Phylogeny> {
        if self.kind != TreeKind::Unrooted {
            return Err(Error::KindMismatch { expected: TreeKind::Unrooted, found: self.kind });
        }
        if handle >= self.node_count() || self.is_leaf(handle) {
            return Err(Error::Precondition { node: handle, message: "handle must be an internal node".into() });
        }
        let m = self.node_count();
        let adjacency: Vec<Vec<NodeId>> = self.nodes().map(|v| self.neighbors(v)).collect();
        let mut children = vec![Vec::new(); m];
        let mut visited = vec![false; m];
        let mut stack = vec![handle];
        visited[handle] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !visited[w] {
                    visited[w] = true;
                    children[v].push(w);
                    stack.push(w);
                }
            }
        }
        Phylogeny::from_children(self.kind, self.taxa.clone(), children, self.taxon.clone(), handle)
    }

    /// The same tree indexed against another ordering of the same labels.
    pub fn with_taxa(&self, taxa: Arc<TaxonSet>) -> Result<Phylogeny> {
        if Arc::ptr_eq(&self.taxa, &taxa) || *self.taxa == *taxa {
            return Ok(self.clone());
        }
        if !self.taxa.same_labels(&taxa) {
            return Err(Error::TaxonMismatch);
        }
        let taxon = self
            .taxon
            .iter()
            .map(|t| t.map(|t| taxa.index_of(self.taxa.label(t)).expect("labels match")))
            .collect();
        Phylogeny::from_children(self.kind, taxa, self.children.clone(), taxon, self.root())
    }

    /// A string that is equal for two trees exactly when they are isomorphic
    /// as leaf-labelled trees over the same taxon indices.
    pub fn canonical_form(&self) -> String {
        let tree = match self.kind {
            TreeKind::Unrooted if self.n() >= 3 => {
                let anchor = self.parent[self.leaf[0]].expect("leaf has a neighbor");
                std::borrow::Cow::Owned(self.reroot(anchor).expect("anchor is internal"))
            }
            _ => std::borrow::Cow::Borrowed(self),
        };
        let mut enc = vec![String::new(); tree.node_count()];
        for v in tree.nodes().rev() {
            enc[v] = match tree.taxon[v] {
                Some(t) => t.to_string(),
                None => {
                    let mut parts: Vec<&str> = tree.children[v].iter().map(|&c| enc[c].as_str()).collect();
                    parts.sort_unstable();
                    format!("({})", parts.join(","))
                }
            };
        }
        let prefix = match self.kind {
            TreeKind::Rooted => "R",
            TreeKind::Unrooted => "U",
        };
        format!("{prefix}{}", std::mem::take(&mut enc[0]))
    }

    pub fn is_isomorphic(&self, other: &Phylogeny) -> bool {
        self.kind == other.kind && self.same_taxa(other) && self.canonical_form() == other.canonical_form()
    }

    /// True when both trees index the same taxon set identically.
    pub fn same_taxa(&self, other: &Phylogeny) -> bool {
        Arc::ptr_eq(&self.taxa, &other.taxa) || *self.taxa == *other.taxa
    }

    /// Fails unless both trees share kind and taxon indexing.
    pub fn check_comparable(&self, other: &Phylogeny) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch { expected: self.kind, found: other.kind });
        }
        if !self.same_taxa(other) {
            return Err(Error::TaxonMismatch);
        }
        Ok(())
    }
}

impl PartialEq for Phylogeny {
    /// Isomorphism as leaf-labelled trees.
    fn eq(&self, other: &Self) -> bool {
        self.is_isomorphic(other)
    }
}

impl Eq for Phylogeny {}

pub(crate) fn triplet_from_lca_depths(ab: u32, ac: u32, bc: u32) -> TripletTopology {
    if ab > ac {
        TripletTopology::OutC
    } else if ac > ab {
        TripletTopology::OutB
    } else if bc > ab {
        TripletTopology::OutA
    } else {
        TripletTopology::Fan
    }
}

pub(crate) fn quartet_from_path_sums(ab_cd: u32, ac_bd: u32, ad_bc: u32) -> QuartetTopology {
    if ab_cd < ac_bd && ab_cd < ad_bc {
        QuartetTopology::AbCd
    } else if ac_bd < ab_cd && ac_bd < ad_bc {
        QuartetTopology::AcBd
    } else if ad_bc < ab_cd && ad_bc < ac_bd {
        QuartetTopology::AdBc
    } else {
        QuartetTopology::Star
    }
}

/// Triplet topology read off the explicit restriction `T|X`.
pub fn triplet_topology_by_restriction(tree: &Phylogeny, triplet: [usize; 3]) -> Result<TripletTopology> {
    if tree.kind() != TreeKind::Rooted {
        return Err(Error::KindMismatch { expected: TreeKind::Rooted, found: tree.kind() });
    }
    let r = tree.restrict(&triplet)?;
    let root_kids = r.children(r.root());
    if root_kids.len() == 3 {
        return Ok(TripletTopology::Fan);
    }
    let out = root_kids
        .iter()
        .find_map(|&c| r.taxon(c))
        .expect("a resolved triplet has a leaf child at the root");
    Ok(TripletTopology::with_outgroup(out))
}

/// Quartet topology read off the explicit restriction `T|X`.
pub fn quartet_topology_by_restriction(tree: &Phylogeny, quartet: [usize; 4]) -> Result<QuartetTopology> {
    if tree.kind() != TreeKind::Unrooted {
        return Err(Error::KindMismatch { expected: TreeKind::Unrooted, found: tree.kind() });
    }
    let r = tree.restrict(&quartet)?;
    let cherry = r.internal_nodes().find(|&v| v != r.root());
    let Some(cherry) = cherry else {
        return Ok(QuartetTopology::Star);
    };
    let pair = r.subtree_taxa(cherry);
    let partner = if pair.contains(&0) {
        pair.iter().copied().find(|&t| t != 0)
    } else {
        (1..4).find(|t| !pair.contains(t))
    };
    Ok(QuartetTopology::pairing_first_with(partner.expect("cherry has two taxa")))
}

/// `coarse ⪯ fine`: `coarse` is obtained from `fine` by contracting edges.
pub fn is_refinement(coarse: &Phylogeny, fine: &Phylogeny) -> Result<bool> {
    coarse.check_comparable(fine)?;
    let fine_splits = split_set(fine);
    Ok(split_set(coarse).is_subset(&fine_splits))
}

/// Non-trivial clusters (rooted) or splits (unrooted) of a tree.
pub(crate) fn split_set(tree: &Phylogeny) -> HashSet<FixedBitSet> {
    let n = tree.n();
    let clusters = tree.clusters();
    let mut out = HashSet::new();
    for v in tree.nodes() {
        if tree.is_leaf(v) || tree.parent(v).is_none() {
            continue;
        }
        let mut c = clusters[v].clone();
        if tree.kind() == TreeKind::Unrooted && c.contains(0) {
            c.toggle_range(..n);
        }
        out.insert(c);
    }
    out
}

/// Mutable arena used while building or editing trees.
#[derive(Clone, Debug, Default)]
pub(crate) struct RawTree {
    pub children: Vec<Vec<usize>>,
    pub taxon: Vec<Option<usize>>,
    pub root: usize,
}

impl RawTree {
    pub fn from_tree(tree: &Phylogeny) -> Self {
        RawTree {
            children: tree.children.clone(),
            taxon: tree.taxon.clone(),
            root: tree.root(),
        }
    }

    pub fn add_leaf(&mut self, taxon: usize) -> usize {
        self.children.push(Vec::new());
        self.taxon.push(Some(taxon));
        self.children.len() - 1
    }

    pub fn add_internal(&mut self, children: Vec<usize>) -> usize {
        self.children.push(children);
        self.taxon.push(None);
        self.children.len() - 1
    }

    /// Removes an already-detached node by swapping the last node into its slot.
    pub fn drop_node(&mut self, v: usize) {
        let last = self.children.len() - 1;
        if v != last {
            self.children.swap(v, last);
            self.taxon.swap(v, last);
            for kids in &mut self.children {
                for c in kids.iter_mut() {
                    if *c == last {
                        *c = v;
                    }
                }
            }
            if self.root == last {
                self.root = v;
            }
        }
        self.children.pop();
        self.taxon.pop();
    }

    /// An unrooted handle of degree two is suppressed by merging it into an
    /// internal child (only possible when the tree has three or more leaves).
    pub fn unroot_handle(&mut self) {
        let r = self.root;
        if self.children[r].len() != 2 {
            return;
        }
        let Some(pos) = self.children[r].iter().position(|&c| self.taxon[c].is_none()) else {
            return;
        };
        let keep = self.children[r][pos];
        let other = self.children[r][1 - pos];
        self.children[keep].push(other);
        self.children[r].clear();
        self.root = keep;
        self.drop_node(r);
    }

    pub fn finish(self, kind: TreeKind, taxa: Arc<TaxonSet>) -> Result<Phylogeny> {
        Phylogeny::from_children(kind, taxa, self.children, self.taxon, self.root)
    }
}
