//! Newick reading and writing.
//!
//! Branch lengths and internal node labels are accepted and dropped. Whether
//! a tree is rooted is decided by the caller, never inferred from arity.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tree::{NodeId, Phylogeny, TaxonSet, TreeKind};

/// Parses a single Newick statement.
pub fn parse_newick(text: &str, kind: TreeKind) -> Result<Phylogeny> {
    let mut trees = parse_newick_all(text, kind)?;
    match trees.len() {
        1 => Ok(trees.pop().expect("one tree")),
        0 => Err(Error::Syntax { position: text.len(), message: "no tree found".into() }),
        _ => Err(Error::Syntax {
            position: text.len(),
            message: format!("expected one tree, found {}", trees.len()),
        }),
    }
}

/// Parses every ';'-terminated statement in `text`. Each tree gets its own
/// taxon set in order of first appearance; see [`align_taxa`].
pub fn parse_newick_all(text: &str, kind: TreeKind) -> Result<Vec<Phylogeny>> {
    let mut parser = Parser { src: text.as_bytes(), text, pos: 0 };
    let mut out = Vec::new();
    loop {
        parser.skip_space()?;
        if parser.pos >= parser.src.len() {
            break;
        }
        out.push(parser.statement(kind)?);
    }
    Ok(out)
}

/// Reindexes every tree to the taxon set of the first one. Fails with
/// [`Error::TaxonMismatch`] unless all trees carry the same labels, and with
/// [`Error::KindMismatch`] on mixed kinds.
pub fn align_taxa(trees: Vec<Phylogeny>) -> Result<Vec<Phylogeny>> {
    let Some(first) = trees.first() else {
        return Ok(trees);
    };
    let taxa = first.taxa().clone();
    let kind = first.kind();
    trees
        .into_iter()
        .map(|t| {
            if t.kind() != kind {
                return Err(Error::KindMismatch { expected: kind, found: t.kind() });
            }
            t.with_taxa(taxa.clone())
        })
        .collect()
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

struct Builder {
    children: Vec<Vec<NodeId>>,
    taxon: Vec<Option<usize>>,
    labels: Vec<String>,
}

fn is_delimiter(b: u8) -> bool {
    matches!(b, b'(' | b')' | b',' | b':' | b';' | b'[' | b']' | b'\'') || b.is_ascii_whitespace()
}

impl<'a> Parser<'a> {
    fn err<T>(&self, position: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position, message: message.into() })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_space(&mut self) -> Result<()> {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let start = self.pos;
                    match self.src[self.pos..].iter().position(|&b| b == b']') {
                        Some(off) => self.pos += off + 1,
                        None => return self.err(start, "unterminated comment"),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn statement(&mut self, kind: TreeKind) -> Result<Phylogeny> {
        let start = self.pos;
        let mut b = Builder { children: Vec::new(), taxon: Vec::new(), labels: Vec::new() };
        let root = self.subtree(&mut b)?;
        self.skip_space()?;
        match self.peek() {
            Some(b';') => self.pos += 1,
            Some(_) => return self.err(self.pos, format!("unexpected {:?}", self.peek_char())),
            None => return self.err(self.pos, "missing ';'"),
        }
        if kind == TreeKind::Unrooted && !b.children[root].is_empty() && b.children[root].len() < 3 {
            return Err(Error::InvalidTree(format!(
                "top-level node of an unrooted tree has degree {}, needs at least 3",
                b.children[root].len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for label in &b.labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        let taxa = TaxonSet::new(b.labels).map_err(|_| Error::EmptyLabel(start))?;
        Phylogeny::from_children(kind, Arc::new(taxa), b.children, b.taxon, root)
    }

    fn peek_char(&self) -> char {
        self.text[self.pos..].chars().next().unwrap_or('\0')
    }

    fn subtree(&mut self, b: &mut Builder) -> Result<NodeId> {
        self.skip_space()?;
        let node = if self.peek() == Some(b'(') {
            self.pos += 1;
            let id = b.children.len();
            b.children.push(Vec::new());
            b.taxon.push(None);
            loop {
                let child = self.subtree(b)?;
                b.children[id].push(child);
                self.skip_space()?;
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(_) => return self.err(self.pos, format!("expected ',' or ')', found {:?}", self.peek_char())),
                    None => return self.err(self.pos, "unbalanced parentheses"),
                }
            }
            // Internal labels (support values, clade names) are dropped.
            self.skip_space()?;
            self.label()?;
            id
        } else {
            let at = self.pos;
            let label = self.label()?;
            match label {
                Some(l) if !l.is_empty() => {
                    let id = b.children.len();
                    b.children.push(Vec::new());
                    b.taxon.push(Some(b.labels.len()));
                    b.labels.push(l);
                    id
                }
                Some(_) => return Err(Error::EmptyLabel(at)),
                None => {
                    return match self.peek() {
                        None => self.err(at, "unexpected end of input"),
                        Some(b',' | b')' | b':' | b';') => Err(Error::EmptyLabel(at)),
                        Some(_) => self.err(at, format!("unexpected {:?}", self.peek_char())),
                    }
                }
            }
        };
        self.skip_space()?;
        if self.peek() == Some(b':') {
            self.pos += 1;
            self.skip_space()?;
            let at = self.pos;
            while self.peek().is_some_and(|c| !is_delimiter(c)) {
                self.pos += 1;
            }
            let len = &self.text[at..self.pos];
            if len.parse::<f64>().is_err() {
                return self.err(at, format!("invalid branch length {len:?}"));
            }
        }
        Ok(node)
    }

    /// Reads a quoted or bare label, or returns `None` if none starts here.
    fn label(&mut self) -> Result<Option<String>> {
        match self.peek() {
            Some(b'\'') => {
                let start = self.pos;
                self.pos += 1;
                let mut out = String::new();
                loop {
                    let rest = &self.text[self.pos..];
                    let Some(off) = rest.find('\'') else {
                        return self.err(start, "unterminated quoted label");
                    };
                    out.push_str(&rest[..off]);
                    self.pos += off + 1;
                    if self.peek() == Some(b'\'') {
                        out.push('\'');
                        self.pos += 1;
                    } else {
                        return Ok(Some(out));
                    }
                }
            }
            Some(c) if !is_delimiter(c) => {
                let start = self.pos;
                while self.peek().is_some_and(|c| !is_delimiter(c)) {
                    self.pos += 1;
                }
                Ok(Some(self.text[start..self.pos].to_string()))
            }
            _ => Ok(None),
        }
    }
}

/// Orders labels with embedded digit runs compared numerically, so that
/// "2" sorts before "10".
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a.as_bytes(), b.as_bytes());
    while !x.is_empty() && !y.is_empty() {
        if x[0].is_ascii_digit() && y[0].is_ascii_digit() {
            let dx = x.iter().take_while(|c| c.is_ascii_digit()).count();
            let dy = y.iter().take_while(|c| c.is_ascii_digit()).count();
            let nx = trim_zeros(&x[..dx]);
            let ny = trim_zeros(&y[..dy]);
            let ord = nx.len().cmp(&ny.len()).then_with(|| nx.cmp(ny));
            if ord != Ordering::Equal {
                return ord;
            }
            x = &x[dx..];
            y = &y[dy..];
        } else {
            if x[0] != y[0] {
                return x[0].cmp(&y[0]);
            }
            x = &x[1..];
            y = &y[1..];
        }
    }
    x.len().cmp(&y.len()).then_with(|| a.cmp(b))
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let nz = digits.iter().take_while(|&&c| c == b'0').count();
    &digits[nz..]
}

fn quote_if_needed(label: &str) -> String {
    if label.bytes().any(is_delimiter) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// Serializes a tree with children ordered by their smallest leaf label.
/// Unrooted trees are written hanging from the neighbor of their smallest
/// leaf, which makes the output independent of the stored handle.
pub fn write_newick(tree: &Phylogeny) -> String {
    let taxa = tree.taxa().clone();
    let smallest = (0..tree.n())
        .min_by(|&a, &b| natural_cmp(taxa.label(a), taxa.label(b)))
        .expect("taxon sets are non-empty");
    let rehung;
    let tree = match tree.kind() {
        TreeKind::Unrooted if tree.n() >= 3 => {
            let anchor = tree.parent(tree.leaf_node(smallest)).expect("leaf has a neighbor");
            rehung = tree.reroot(anchor).expect("anchor is internal");
            &rehung
        }
        _ => tree,
    };
    let mut min_leaf = vec![usize::MAX; tree.node_count()];
    for v in tree.nodes().rev() {
        min_leaf[v] = match tree.taxon(v) {
            Some(t) => t,
            None => tree
                .children(v)
                .iter()
                .map(|&c| min_leaf[c])
                .min_by(|&a, &b| natural_cmp(taxa.label(a), taxa.label(b)))
                .expect("internal node has children"),
        };
    }
    let mut out = String::new();
    write_node(tree, tree.root(), &min_leaf, &mut out);
    out.push(';');
    out
}

fn write_node(tree: &Phylogeny, v: NodeId, min_leaf: &[usize], out: &mut String) {
    if let Some(t) = tree.taxon(v) {
        out.push_str(&quote_if_needed(tree.taxa().label(t)));
        return;
    }
    let taxa = tree.taxa();
    let mut kids = tree.children(v).to_vec();
    kids.sort_by(|&a, &b| natural_cmp(taxa.label(min_leaf[a]), taxa.label(min_leaf[b])));
    out.push('(');
    for (i, &c) in kids.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_node(tree, c, min_leaf, out);
    }
    out.push(')');
}
