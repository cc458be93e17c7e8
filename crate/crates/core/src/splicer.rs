//! k-splicers (unions of spanning trees) and the uniformly weighted 2-splicer
//! sparsifier of G(n, p).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::rng::Seed;
use crate::sampler::{sample_trees, sequential_two_trees_bp};
use crate::tree::SpanningTree;

/// Retries of Process B_p inside [`sparsify_gnp`].
pub const SPARSIFY_RETRIES: usize = 16;

/// Union of `k` spanning trees on a common vertex set.
#[derive(Clone, Debug)]
pub struct Splicer {
    support: Graph,
    multiplicity: Vec<u32>,
    trees: Vec<SpanningTree>,
}

impl Splicer {
    pub fn n(&self) -> usize {
        self.support.n()
    }

    pub fn k(&self) -> usize {
        self.trees.len()
    }

    /// Deduplicated union as a simple graph; edge ids follow first appearance.
    pub fn support(&self) -> &Graph {
        &self.support
    }

    /// Number of source trees containing each support edge, by support edge id.
    pub fn multiplicity(&self) -> &[u32] {
        &self.multiplicity
    }

    pub fn trees(&self) -> &[SpanningTree] {
        &self.trees
    }

    /// Number of support edges crossing the cut given by `mask`.
    pub fn cut_size(&self, members: &[Vertex], mask: &[bool]) -> usize {
        self.support.cut_size(members, mask)
    }
}

/// Union of the given trees, counting how many trees contain each edge.
pub fn union_trees(trees: Vec<SpanningTree>) -> Result<Splicer> {
    let Some(first) = trees.first() else {
        return Err(Error::InvalidParameter("need at least one tree".into()));
    };
    let n = first.n();
    if let Some(bad) = trees.iter().find(|t| t.n() != n) {
        return Err(Error::InvalidParameter(format!(
            "trees span different vertex counts ({n} and {})",
            bad.n()
        )));
    }
    let mut index: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut multiplicity = Vec::new();
    for t in &trees {
        for &e in t.edges() {
            let id = *index.entry(e).or_insert_with(|| {
                edges.push(e);
                multiplicity.push(0);
                edges.len() - 1
            });
            multiplicity[id] += 1;
        }
    }
    Ok(Splicer {
        support: Graph::from_checked(n, edges),
        multiplicity,
        trees,
    })
}

/// Random k-splicer of `g`: the union of `k` independent uniform spanning trees.
pub fn splice(g: &Graph, k: usize, seed: Seed) -> Result<Splicer> {
    union_trees(sample_trees(g, k, seed.derive("splicer.splice", 0))?)
}

/// Graph with a strictly positive weight on every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    graph: Graph,
    weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != graph.m() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.m()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!("weight {w} is not strictly positive")));
        }
        Ok(WeightedGraph { graph, weights })
    }

    pub fn uniform(graph: Graph, weight: f64) -> Result<Self> {
        let m = graph.m();
        Self::new(graph, vec![weight; m])
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// w(δ(A)) for the cut given by `members`/`mask`.
    pub fn cut_weight(&self, members: &[Vertex], mask: &[bool]) -> f64 {
        members
            .iter()
            .flat_map(|&v| self.graph.neighbors(v))
            .filter(|&&(w, _)| !mask[w])
            .map(|&(_, id)| self.weights[id])
            .sum()
    }
}

/// Sparsifier of a G(n, p) sample: the support of the two trees read off one
/// Process B_p walk, every edge weighted `p·n` (edges in both trees count
/// once). A failed walk is retried on a fresh substream.
pub fn sparsify_gnp(h: &Graph, p: f64, seed: Seed) -> Result<WeightedGraph> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (0, 1]")));
    }
    if h.n() < 2 {
        return Err(Error::InvalidSize("sparsifier needs n >= 2".into()));
    }
    for attempt in 0..SPARSIFY_RETRIES {
        let s = seed.derive("splicer.sparsify_gnp", attempt as u64);
        if let Ok((a, b)) = sequential_two_trees_bp(h, p, s)? {
            let splicer = union_trees(vec![a, b])?;
            let weight = p * h.n() as f64;
            return WeightedGraph::uniform(splicer.support().clone(), weight);
        }
    }
    Err(Error::SparsifyFailed {
        attempts: SPARSIFY_RETRIES,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, gnp_graph, path_graph, petersen_graph};

    fn tree(n: usize, edges: &[(usize, usize)]) -> SpanningTree {
        SpanningTree::from_edges(n, 0, edges).unwrap()
    }

    #[test]
    fn single_tree_union() {
        let t = tree(4, &[(0, 1), (1, 2), (1, 3)]);
        let s = union_trees(vec![t.clone()]).unwrap();
        assert_eq!(s.support().m(), 3);
        assert!(s.multiplicity().iter().all(|&m| m == 1));
        assert_eq!(s.k(), 1);
    }

    #[test]
    fn identical_trees_double_multiplicity() {
        let t = tree(3, &[(0, 1), (1, 2)]);
        let s = union_trees(vec![t.clone(), t]).unwrap();
        assert_eq!(s.support().m(), 2);
        assert_eq!(s.multiplicity(), &[2, 2]);
    }

    #[test]
    fn disjoint_trees() {
        let a = tree(4, &[(0, 1), (1, 2), (2, 3)]);
        let b = tree(4, &[(0, 2), (0, 3), (1, 3)]);
        let s = union_trees(vec![a, b]).unwrap();
        assert_eq!(s.support().m(), 6);
    }

    #[test]
    fn mismatched_trees_rejected() {
        let a = tree(3, &[(0, 1), (1, 2)]);
        let b = tree(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(union_trees(vec![a, b]).is_err());
        assert!(union_trees(vec![]).is_err());
    }

    #[test]
    fn splicing_a_tree_gives_the_tree() {
        let g = path_graph(9).unwrap();
        for k in 1..5 {
            let s = splice(&g, k, Seed(k as u64)).unwrap();
            assert_eq!(s.support().edges(), g.edges());
        }
    }

    #[test]
    fn splicer_accounting() {
        let g = petersen_graph();
        let s = splice(&g, 3, Seed(2)).unwrap();
        let total: u32 = s.multiplicity().iter().sum();
        assert_eq!(total as usize, 3 * 9);
        assert!(s.support().is_connected());
        for t in s.trees() {
            for &(u, v) in t.edges() {
                assert!(s.support().has_edge(u, v));
            }
        }
    }

    #[test]
    fn weighted_graph_validation() {
        let g = complete_graph(3).unwrap();
        assert!(WeightedGraph::new(g.clone(), vec![1.0, 2.0]).is_err());
        assert!(WeightedGraph::new(g.clone(), vec![1.0, 0.0, 2.0]).is_err());
        assert!(WeightedGraph::new(g.clone(), vec![1.0, f64::NAN, 2.0]).is_err());
        let w = WeightedGraph::new(g, vec![1.0, 2.0, 3.0]).unwrap();
        let mask = [true, false, false];
        assert_eq!(w.cut_weight(&[0], &mask), 3.0);
    }

    #[test]
    fn sparsifier_size_and_weights() {
        let n = 200;
        let p = 10.0 * (n as f64).ln() / n as f64;
        let h = gnp_graph(n, p, Seed(1)).unwrap();
        let w = sparsify_gnp(&h, p, Seed(1)).unwrap();
        assert!(w.graph().m() <= 2 * (n - 1));
        assert!(w.graph().is_connected());
        assert!(w.weights().iter().all(|&x| x == p * n as f64));
        for &(u, v) in w.graph().edges() {
            assert!(h.has_edge(u, v));
        }
        assert!(w.total_weight() <= 2.0 * (n - 1) as f64 * p * n as f64);
    }

    #[test]
    fn sparsifier_reports_exhausted_retries() {
        // An empty graph on 4 vertices can never be covered.
        let h = Graph::empty(4);
        assert_eq!(
            sparsify_gnp(&h, 0.5, Seed(0)),
            Err(Error::SparsifyFailed { attempts: SPARSIFY_RETRIES })
        );
        assert!(matches!(sparsify_gnp(&h, 0.0, Seed(0)), Err(Error::InvalidParameter(_))));
    }
}
