//! Undirected simple graphs with stable edge ids, generators, and exact oracles.

mod generators;
pub mod linalg;
mod lower_bound;
mod orient;

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};

pub use generators::{complete_graph, cycle_graph, gnp_graph, path_graph, petersen_graph, random_regular_graph, star_graph};
pub use linalg::{effective_resistance, laplacian, spanning_tree_count, ResistanceOracle};
pub use lower_bound::{lower_bound_family, LowerBoundFamily};
pub use orient::{direct_edges_dp, orientation_probabilities, DirectedGraph, Orientation};

pub type Vertex = usize;
pub type EdgeId = usize;

/// Normalizes an unordered pair so the smaller endpoint comes first.
#[inline]
pub fn ordered(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Immutable undirected simple graph. Edge ids are dense and follow insertion
/// order; `adjacency[v]` holds `(neighbor, edge id)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<(Vertex, EdgeId)>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let e = ordered(u, v);
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
            list.push(e);
        }
        Ok(Self::from_checked(n, list))
    }

    /// Caller guarantees a simple, normalized edge list.
    pub(crate) fn from_checked(n: usize, edges: Vec<(Vertex, Vertex)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        Graph {
            n,
            edges,
            adjacency,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_checked(n, Vec::new())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> (Vertex, Vertex) {
        self.edges[id]
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Id of edge `{u, v}`, scanning the shorter adjacency list.
    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a]
            .iter()
            .find(|&&(w, _)| w == b)
            .map(|&(_, id)| id)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_id(u, v).is_some()
    }

    /// Connected-component label per vertex, labels in discovery order.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &(w, _) in &self.adjacency[u] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().iter().all(|&c| c == 0)
    }

    /// Hop distances from `source`; unreachable vertices get `usize::MAX`.
    pub fn bfs_distances(&self, source: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Membership mask for a vertex set after validating it is a proper,
    /// nonempty subset.
    pub fn subset_mask(&self, set: &[Vertex]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        let mut size = 0;
        for &v in set {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
            if !mask[v] {
                mask[v] = true;
                size += 1;
            }
        }
        if size == 0 || size == self.n {
            return Err(Error::InvalidParameter(
                "vertex set must be nonempty and proper".into(),
            ));
        }
        Ok(mask)
    }

    /// δ(A): ids of edges with exactly one endpoint in `set`.
    pub fn cut_edges(&self, set: &[Vertex]) -> Result<Vec<EdgeId>> {
        let mask = self.subset_mask(set)?;
        Ok(self.cut_edges_masked(&mask))
    }

    pub fn cut_edges_masked(&self, mask: &[bool]) -> Vec<EdgeId> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| mask[u] != mask[v])
            .map(|(id, _)| id)
            .collect()
    }

    /// |δ(A)| by scanning only the adjacency of the members of A.
    pub fn cut_size(&self, members: &[Vertex], mask: &[bool]) -> usize {
        members
            .iter()
            .map(|&v| self.adjacency[v].iter().filter(|&&(w, _)| !mask[w]).count())
            .sum()
    }

    /// Γ'(A): neighbors of A outside A, ascending.
    pub fn outer_boundary(&self, set: &[Vertex]) -> Vec<Vertex> {
        let mut inside = vec![false; self.n];
        for &v in set {
            inside[v] = true;
        }
        let mut out = vec![false; self.n];
        for &v in set {
            for &(w, _) in &self.adjacency[v] {
                if !inside[w] {
                    out[w] = true;
                }
            }
        }
        (0..self.n).filter(|&v| out[v]).collect()
    }

    /// Same vertex set with every edge flagged in `removed` dropped.
    pub fn without_edges(&self, removed: &[bool]) -> Graph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(id, _)| !removed[id])
            .map(|(_, &e)| e)
            .collect();
        Graph::from_checked(self.n, edges)
    }
}
