//! Finite trees of sequences: prefix-closed sets of finite sequences over a
//! bounded alphabet, ordered by initial-segment inclusion.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::code::CanonicalCode;
use crate::metric::Bijection;
use crate::perm::Permutations;

pub type Sequence = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("EmptyInput")]
    EmptyInput,
    #[error("MissingPrefix({}, {})", SeqDisplay(.node), SeqDisplay(.prefix))]
    MissingPrefix { node: Sequence, prefix: Sequence },
}

impl TreeError {
    pub fn name(&self) -> &'static str {
        match self {
            TreeError::EmptyInput => "EmptyInput",
            TreeError::MissingPrefix { .. } => "MissingPrefix",
        }
    }
}

/// Displays a sequence as `(0,1,2)`; the empty sequence is `()`.
pub struct SeqDisplay<'a>(pub &'a [u32]);

impl fmt::Display for SeqDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

pub fn node_label(u: &[u32]) -> String {
    SeqDisplay(u).to_string()
}

/// Longest common initial segment `u ⊓ v`.
pub fn meet(u: &[u32], v: &[u32]) -> Sequence {
    u.iter()
        .zip(v)
        .take_while(|(a, b)| a == b)
        .map(|(a, _)| *a)
        .collect()
}

pub fn is_prefix(u: &[u32], v: &[u32]) -> bool {
    u.len() <= v.len() && v[..u.len()] == *u
}

/// A finite tree. Nodes are kept in lexicographic order, so the root is
/// index 0 and every node comes after its prefixes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    nodes: Vec<Sequence>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

/// Accepts a node set iff it is nonempty and closed under prefixes.
/// Duplicate sequences are merged.
pub fn validate_tree(sequences: impl IntoIterator<Item = Sequence>) -> Result<Tree, TreeError> {
    let set: BTreeSet<Sequence> = sequences.into_iter().collect();
    if set.is_empty() {
        return Err(TreeError::EmptyInput);
    }
    for node in &set {
        // The empty sequence is a prefix of everything, so checking the
        // immediate predecessor of each node suffices.
        if let Some((_, prefix)) = node.split_last() {
            if !set.contains(prefix) {
                return Err(TreeError::MissingPrefix {
                    node: node.clone(),
                    prefix: prefix.to_vec(),
                });
            }
        }
    }
    Ok(Tree::from_sorted(set.into_iter().collect()))
}

impl Tree {
    fn from_sorted(nodes: Vec<Sequence>) -> Tree {
        let index: BTreeMap<&[u32], usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        let parent: Vec<Option<usize>> = nodes
            .iter()
            .map(|s| s.split_last().map(|(_, p)| index[p]))
            .collect();
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(i);
            }
        }
        Tree {
            nodes,
            parent,
            children,
        }
    }

    /// The one-node tree `{∅}`.
    pub fn root_only() -> Tree {
        Tree::from_sorted(vec![Vec::new()])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Sequence] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &[u32] {
        &self.nodes[i]
    }

    pub fn index_of(&self, u: &[u32]) -> Option<usize> {
        self.nodes.binary_search_by(|s| s.as_slice().cmp(u)).ok()
    }

    pub fn contains(&self, u: &[u32]) -> bool {
        self.index_of(u).is_some()
    }

    /// Length of node `i`.
    pub fn lh(&self, i: usize) -> usize {
        self.nodes[i].len()
    }

    /// Immediate predecessor of node `i`.
    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// No proper extension of the node is in the tree.
    pub fn is_terminal(&self, i: usize) -> bool {
        self.children[i].is_empty()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Smallest `k` such that every entry is below `k`.
    pub fn branching_bound(&self) -> u32 {
        self.nodes
            .iter()
            .flatten()
            .map(|&x| x + 1)
            .max()
            .unwrap_or(0)
    }

    /// Applies `f` to every node and re-validates.
    pub fn map_nodes(&self, f: impl Fn(&[u32]) -> Sequence) -> Result<Tree, TreeError> {
        validate_tree(self.nodes.iter().map(|s| f(s)))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.nodes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", SeqDisplay(s))?;
        }
        write!(f, "}}")
    }
}

/// AHU code: terminal nodes are leaves, inner nodes the sorted multiset of
/// their children's codes.
pub fn tree_canonical(t: &Tree) -> CanonicalCode {
    fn code(t: &Tree, i: usize) -> CanonicalCode {
        if t.is_terminal(i) {
            CanonicalCode::Leaf
        } else {
            CanonicalCode::node(None, t.children(i).iter().map(|&c| code(t, c)).collect())
        }
    }
    code(t, 0)
}

/// Rank of node `i`: 0 at terminal nodes, otherwise one more than the
/// largest rank of an immediate successor.
pub fn node_rank(t: &Tree, i: usize) -> usize {
    t.children(i)
        .iter()
        .map(|&c| node_rank(t, c) + 1)
        .max()
        .unwrap_or(0)
}

/// Rank of the root.
pub fn tree_rank(t: &Tree) -> usize {
    node_rank(t, 0)
}

/// `u ⊆ v ⟺ f(u) ⊆ f(v)` for all nodes, with `f` a bijection of the node sets.
pub fn is_tree_isomorphism(t: &Tree, s: &Tree, f: &Bijection) -> bool {
    if t.len() != s.len() || f.len() != t.len() {
        return false;
    }
    (0..t.len()).all(|u| {
        (0..t.len()).all(|v| {
            is_prefix(t.node(u), t.node(v)) == is_prefix(s.node(f.apply(u)), s.node(f.apply(v)))
        })
    })
}

pub fn preserves_lengths(t: &Tree, s: &Tree, f: &Bijection) -> bool {
    f.len() == t.len() && (0..t.len()).all(|u| t.lh(u) == s.lh(f.apply(u)))
}

/// Brute-force isomorphism search over all node bijections.
pub fn tree_isomorphic_exhaustive(t: &Tree, s: &Tree) -> Option<Bijection> {
    if t.len() != s.len() {
        return None;
    }
    Permutations::new(t.len())
        .map(|p| Bijection::new(p).expect("permutation"))
        .find(|f| is_tree_isomorphism(t, s, f))
}

/// All trees with at most `max_nodes` nodes, entries below `branching`, and
/// length at most `depth`; by node count, then lexicographically on the
/// sorted node list.
pub fn enumerate_trees(max_nodes: usize, branching: u32, depth: usize) -> TreeEnumerator {
    TreeEnumerator {
        max_nodes,
        branching,
        depth,
        level: vec![vec![Vec::new()]],
        pos: 0,
        size: 1,
    }
}

#[derive(Debug, Clone)]
pub struct TreeEnumerator {
    max_nodes: usize,
    branching: u32,
    depth: usize,
    /// Sorted node lists of the current size.
    level: Vec<Vec<Sequence>>,
    pos: usize,
    size: usize,
}

impl TreeEnumerator {
    fn next_level(&self) -> Vec<Vec<Sequence>> {
        let mut out: BTreeSet<Vec<Sequence>> = BTreeSet::new();
        for nodes in &self.level {
            let present: BTreeSet<&Sequence> = nodes.iter().collect();
            for u in nodes {
                if u.len() >= self.depth {
                    continue;
                }
                for a in 0..self.branching {
                    let mut v = u.clone();
                    v.push(a);
                    if present.contains(&v) {
                        continue;
                    }
                    let mut grown = nodes.clone();
                    let at = grown.binary_search(&v).unwrap_err();
                    grown.insert(at, v);
                    out.insert(grown);
                }
            }
        }
        out.into_iter().collect()
    }
}

impl Iterator for TreeEnumerator {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        if self.max_nodes == 0 {
            return None;
        }
        while self.pos >= self.level.len() {
            if self.size >= self.max_nodes || self.level.is_empty() {
                return None;
            }
            self.level = self.next_level();
            self.pos = 0;
            self.size += 1;
        }
        let nodes = self.level[self.pos].clone();
        self.pos += 1;
        Some(Tree::from_sorted(nodes))
    }
}
