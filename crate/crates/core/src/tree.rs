//! Spanning trees and the walk traces that produce them.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ordered, EdgeId, Graph, Vertex};

/// Spanning tree rooted at the vertex its walk started from. `edges` are
/// normalized pairs in first-visit order; `parent[v]` is the vertex `v` was
/// first entered from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningTree {
    n: usize,
    root: Vertex,
    parent: Vec<Option<Vertex>>,
    edges: Vec<(Vertex, Vertex)>,
}

/// Vertex sequence of a walk together with first-visit times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkTrace {
    /// X_0, X_1, ...: the start vertex followed by one entry per step.
    pub vertices: Vec<Vertex>,
    /// Step index of the first visit to each vertex (`u64::MAX` if never).
    pub first_visit: Vec<u64>,
    pub steps: u64,
}

impl WalkTrace {
    pub fn distinct(&self) -> usize {
        self.first_visit.iter().filter(|&&t| t != u64::MAX).count()
    }
}

impl SpanningTree {
    /// Builds from `parent` pointers collected during a walk, in first-visit order.
    pub(crate) fn from_walk(root: Vertex, parent: Vec<Option<Vertex>>, order: &[Vertex]) -> Self {
        let edges = order
            .iter()
            .filter_map(|&v| parent[v].map(|p| ordered(p, v)))
            .collect();
        SpanningTree {
            n: parent.len(),
            root,
            parent,
            edges,
        }
    }

    /// Builds from an unordered edge list, orienting parents towards `root`.
    /// Edges are kept in the given order.
    pub fn from_edges(n: usize, root: Vertex, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        if root >= n {
            return Err(Error::VertexOutOfRange { vertex: root, n });
        }
        if edges.len() + 1 != n {
            return Err(Error::InvalidParameter(format!(
                "a spanning tree on {n} vertices has {} edges, got {}",
                n.saturating_sub(1),
                edges.len()
            )));
        }
        let g = Graph::from_edges(n, edges.iter().copied())?;
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &(w, _) in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached != n {
            return Err(Error::InvalidParameter("edges do not form a spanning tree".into()));
        }
        Ok(SpanningTree {
            n,
            root,
            parent,
            edges: g.edges().to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<Vertex>] {
        &self.parent
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// Sorted edge list; equal for equal trees regardless of root or order.
    pub fn canonical_edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        self.parent[u] == Some(v) || self.parent[v] == Some(u)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Edge ids of the tree edges in `g`; fails if the tree is not a subgraph.
    pub fn base_edge_ids(&self, g: &Graph) -> Result<Vec<EdgeId>> {
        self.edges
            .iter()
            .map(|&(u, v)| g.edge_id(u, v).ok_or(Error::MissingEdge(u, v)))
            .collect()
    }

    /// The tree as a standalone graph.
    pub fn as_graph(&self) -> Graph {
        Graph::from_checked(self.n, self.edges.clone())
    }

    /// Number of tree edges crossing the cut given by `mask`.
    pub fn cut_size(&self, mask: &[bool]) -> usize {
        self.edges.iter().filter(|&&(u, v)| mask[u] != mask[v]).count()
    }

    /// Vertices of the subtree hanging below `v` (including `v`).
    pub fn subtree(&self, v: Vertex) -> Vec<Vertex> {
        let children = self.children();
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&children[out[i]]);
            i += 1;
        }
        out
    }

    pub fn children(&self) -> Vec<Vec<Vertex>> {
        let mut children = vec![Vec::new(); self.n];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        children
    }

    /// Prüfer sequence of the (unrooted) tree; length n - 2.
    pub fn prufer(&self) -> Vec<Vertex> {
        let n = self.n;
        if n <= 2 {
            return Vec::new();
        }
        let mut deg = self.degrees();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut removed = vec![false; n];
        let mut code = Vec::with_capacity(n - 2);
        for _ in 0..n - 2 {
            let leaf = (0..n).find(|&v| !removed[v] && deg[v] == 1).expect("tree has a leaf");
            let nb = adj[leaf]
                .iter()
                .copied()
                .find(|&w| !removed[w])
                .expect("leaf has a neighbor");
            code.push(nb);
            removed[leaf] = true;
            deg[leaf] -= 1;
            deg[nb] -= 1;
        }
        code
    }

    /// Index of the tree among all n^(n-2) labeled trees (Prüfer code read
    /// as a base-n number). Only for n small enough to fit in a `u64`.
    pub fn prufer_index(&self) -> u64 {
        self.prufer()
            .iter()
            .fold(0u64, |acc, &x| acc * self.n as u64 + x as u64)
    }

    /// Checks acyclicity, spanning, and parent/edge consistency.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.edges.len() + 1 != self.n {
            return Err(format!("{} edges on {} vertices", self.edges.len(), self.n));
        }
        if self.parent[self.root].is_some() {
            return Err("root has a parent".into());
        }
        for (v, p) in self.parent.iter().enumerate() {
            if v != self.root {
                let p = p.ok_or_else(|| format!("vertex {v} has no parent"))?;
                if !self.edges.contains(&ordered(p, v)) {
                    return Err(format!("parent edge ({p},{v}) not in edge list"));
                }
            }
        }
        // n - 1 parent edges that all lead back to the root form a spanning tree.
        for start in 0..self.n {
            let mut v = start;
            let mut hops = 0;
            while let Some(p) = self.parent[v] {
                v = p;
                hops += 1;
                if hops > self.n {
                    return Err(format!("parent chain from {start} has a cycle"));
                }
            }
            if v != self.root {
                return Err(format!("vertex {start} does not reach the root"));
            }
        }
        Ok(())
    }

    /// Checks that every parent edge is the edge used on that vertex's first
    /// visit in `trace`.
    pub fn consistent_with(&self, trace: &WalkTrace) -> bool {
        for v in 0..self.n {
            let t = trace.first_visit[v];
            if t == u64::MAX {
                return false;
            }
            let expected = if t == 0 {
                None
            } else {
                Some(trace.vertices[t as usize - 1])
            };
            if expected != self.parent[v] {
                return false;
            }
        }
        trace.vertices.first() == Some(&self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_orients_to_root() {
        let t = SpanningTree::from_edges(4, 2, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(t.parent(2), None);
        assert_eq!(t.parent(1), Some(2));
        assert_eq!(t.parent(0), Some(1));
        t.validate().unwrap();
        assert!(SpanningTree::from_edges(4, 0, &[(0, 1), (1, 2), (0, 2)]).is_err());
        assert!(SpanningTree::from_edges(4, 0, &[(0, 1), (1, 2)]).is_err());
    }

    #[test]
    fn prufer_of_star_and_path() {
        let star = SpanningTree::from_edges(5, 0, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(star.prufer(), vec![0, 0, 0]);
        let path = SpanningTree::from_edges(4, 0, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(path.prufer(), vec![1, 2]);
        assert_eq!(path.prufer_index(), 6);
    }

    #[test]
    fn subtree_below_vertex() {
        let t = SpanningTree::from_edges(5, 0, &[(0, 1), (1, 2), (1, 3), (0, 4)]).unwrap();
        let mut s = t.subtree(1);
        s.sort();
        assert_eq!(s, vec![1, 2, 3]);
    }
}
