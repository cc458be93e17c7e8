use super::{Graph, Vertex};
use crate::error::{Error, Result};
use crate::rng::Seed;

/// Directed graph on the vertex set of an undirected source graph. Arc ids are
/// dense; `out[v]` lists `(head, arc id)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    arcs: Vec<(Vertex, Vertex)>,
    out: Vec<Vec<(Vertex, usize)>>,
}

impl DirectedGraph {
    pub fn from_arcs(n: usize, arcs: Vec<(Vertex, Vertex)>) -> Self {
        let mut out = vec![Vec::new(); n];
        for (id, &(u, v)) in arcs.iter().enumerate() {
            out[u].push((v, id));
        }
        DirectedGraph { n, arcs, out }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(Vertex, Vertex)] {
        &self.arcs
    }

    pub fn out_arcs(&self, v: Vertex) -> &[(Vertex, usize)] {
        &self.out[v]
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out[v].len()
    }
}

/// Orientation outcome for one undirected edge `{u, v}` with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Both,
    Forward,
    Backward,
}

/// `(both, forward only, backward only)` probabilities for D_p(H).
///
/// With `s = √(1-p)` the three probabilities are `(2 - p - 2s)/p`,
/// `(p + s - 1)/p` and `(p + s - 1)/p`. They are evaluated in the equivalent
/// forms `p/(1+s)²` and `s/(1+s)` which avoid cancellation for small `p`.
pub fn orientation_probabilities(p: f64) -> Result<(f64, f64, f64)> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "orientation needs 0 < p <= 1, got {p}"
        )));
    }
    let s = (1.0 - p).sqrt();
    let both = p / ((1.0 + s) * (1.0 + s));
    let single = s / (1.0 + s);
    Ok((both, single, single))
}

/// Random orientation D_p(H). Edges are processed in edge-id order; for each,
/// one uniform draw picks both arcs, `(u,v)` only, or `(v,u)` only. When H is
/// G(n,p), every arc is then present independently with probability
/// `1 - √(1-p)`.
pub fn direct_edges_dp(h: &Graph, p: f64, seed: Seed) -> Result<DirectedGraph> {
    let (both, forward, _) = orientation_probabilities(p)?;
    let mut rng = seed.stream("graph.direct_edges_dp", 0);
    let mut arcs = Vec::with_capacity(h.m() * 2);
    for &(u, v) in h.edges() {
        let x = rng.unit();
        match classify(x, both, forward) {
            Orientation::Both => {
                arcs.push((u, v));
                arcs.push((v, u));
            }
            Orientation::Forward => arcs.push((u, v)),
            Orientation::Backward => arcs.push((v, u)),
        }
    }
    Ok(DirectedGraph::from_arcs(h.n(), arcs))
}

fn classify(x: f64, both: f64, forward: f64) -> Orientation {
    if x < both {
        Orientation::Both
    } else if x < both + forward {
        Orientation::Forward
    } else {
        Orientation::Backward
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_graph;

    fn direct_form(p: f64) -> (f64, f64) {
        let s = (1.0 - p).sqrt();
        ((-p - 2.0 * s + 2.0) / p, (p + s - 1.0) / p)
    }

    #[test]
    fn probabilities_at_one_and_three_quarters() {
        assert_eq!(orientation_probabilities(1.0).unwrap(), (1.0, 0.0, 0.0));
        let (b, f, r) = orientation_probabilities(0.75).unwrap();
        for x in [b, f, r] {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        let q = 1.0 - (1.0f64 - 0.75).sqrt();
        assert_eq!(q, 0.5);
        assert!((0.75 / 2.0..=0.75).contains(&q));
    }

    #[test]
    fn stable_form_matches_direct_formula() {
        for &p in &[0.9, 0.5, 0.1, 0.01, 1e-3] {
            let (b, f, _) = orientation_probabilities(p).unwrap();
            let (pb, pf) = direct_form(p);
            assert!((b - pb).abs() < 1e-12, "p={p}");
            assert!((f - pf).abs() < 1e-12, "p={p}");
            assert!((b + 2.0 * f - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_zero() {
        assert!(orientation_probabilities(0.0).is_err());
        assert!(direct_edges_dp(&complete_graph(3).unwrap(), 0.0, Seed(0)).is_err());
    }

    #[test]
    fn p_one_orients_both_ways() {
        let k5 = complete_graph(5).unwrap();
        let d = direct_edges_dp(&k5, 1.0, Seed(4)).unwrap();
        assert_eq!(d.arcs().len(), 20);
        assert!((0..5).all(|v| d.out_degree(v) == 4));
    }

    #[test]
    fn arcs_come_from_source_edges() {
        let g = crate::graph::petersen_graph();
        let d = direct_edges_dp(&g, 0.4, Seed(8)).unwrap();
        for &(u, v) in d.arcs() {
            assert!(g.has_edge(u, v));
        }
    }
}
