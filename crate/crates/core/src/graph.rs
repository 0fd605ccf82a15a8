//! Simple undirected graphs on `0..n`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::metric::Bijection;
use crate::perm::Permutations;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    /// Edges stored as `(min, max)`.
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph needs at least one vertex")]
    NoVertices,
    #[error("SelfLoop({0})")]
    SelfLoop(usize),
    #[error("edge ({0},{1}) leaves the vertex range")]
    VertexOutOfRange(usize, usize),
}

impl Graph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange(a, b));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }
}

pub fn is_graph_isomorphism(g: &Graph, h: &Graph, f: &Bijection) -> bool {
    g.n == h.n
        && f.len() == g.n
        && g.edges.len() == h.edges.len()
        && g.edges
            .iter()
            .all(|&(a, b)| h.adjacent(f.apply(a), f.apply(b)))
}

/// Brute-force isomorphism over all vertex bijections.
pub fn graph_isomorphic(g: &Graph, h: &Graph) -> Option<Bijection> {
    if g.n != h.n || g.edges.len() != h.edges.len() {
        return None;
    }
    Permutations::new(g.n)
        .map(|p| Bijection::new(p).expect("permutation"))
        .find(|f| is_graph_isomorphism(g, h, f))
}

/// Every labelled graph on exactly `n` vertices, ordered by edge bitmask.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e);
            Graph::new(n, edges).expect("valid edges")
        })
        .collect()
}
