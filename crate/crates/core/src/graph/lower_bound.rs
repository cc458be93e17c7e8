//! Bounded-degree family on which a few random spanning trees leave a path
//! segment hanging off a single edge.
//!
//! Construction: a d-regular expander G' made of the Hamiltonian cycle
//! `0, 1, ..., n-1` plus `d - 2` random perfect matchings; the Hamiltonian path
//! `0..n` is cut into consecutive segments of `ell` vertices; a pairwise
//! non-interacting subset of segments is picked greedily; each picked segment
//! gets its endpoint edge and a Hamiltonian cycle through its outer
//! neighborhood.

use std::collections::HashSet;

use super::{ordered, Graph, Vertex};
use crate::error::{Error, Result};
use crate::rng::Seed;
use crate::tree::WalkTrace;

const MATCHING_RETRY_CAP: usize = 10_000;

#[derive(Clone, Debug)]
pub struct LowerBoundFamily {
    /// Expander plus the added cycle edges.
    pub graph: Graph,
    /// The d-regular expander before any edges were added.
    pub base: Graph,
    /// Selected segments, each `ell` consecutive vertices of the path.
    pub paths: Vec<Vec<Vertex>>,
    /// Per selected segment: cycle through its outer neighborhood (C1).
    pub outer_cycles: Vec<Vec<Vertex>>,
    /// Per selected segment: cycle formed by the segment and its endpoint edge (C2).
    pub path_cycles: Vec<Vec<Vertex>>,
    pub d: usize,
    pub ell: usize,
}

pub fn lower_bound_family(n: usize, d: usize, ell: usize, seed: Seed) -> Result<LowerBoundFamily> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("degree must be >= 3, got {d}")));
    }
    if ell < 1 {
        return Err(Error::InvalidParameter("segment length must be >= 1".into()));
    }
    if n < d + 1 || n % 2 == 1 {
        return Err(Error::InvalidSize(format!(
            "need an even n > d for the matchings, got n = {n}"
        )));
    }
    let base = hamiltonian_cycle_plus_matchings(n, d, seed)?;

    let candidates = n / ell;
    let mut claimed = vec![false; n];
    let mut paths = Vec::new();
    let mut outer = Vec::new();
    for i in 0..candidates {
        let segment: Vec<Vertex> = (i * ell..(i + 1) * ell).collect();
        let boundary = base.outer_boundary(&segment);
        if segment.iter().chain(&boundary).any(|&v| claimed[v]) {
            continue;
        }
        for &v in segment.iter().chain(&boundary) {
            claimed[v] = true;
        }
        paths.push(segment);
        outer.push(boundary);
    }
    if paths.is_empty() {
        return Err(Error::ParametersTooTight(format!(
            "no non-interacting segment for n = {n}, d = {d}, ell = {ell}"
        )));
    }

    let mut edges: Vec<(Vertex, Vertex)> = base.edges().to_vec();
    let mut present: HashSet<(Vertex, Vertex)> = edges.iter().copied().collect();
    let mut add = |u: Vertex, v: Vertex, edges: &mut Vec<(Vertex, Vertex)>| {
        if u != v && present.insert(ordered(u, v)) {
            edges.push(ordered(u, v));
        }
    };
    for (segment, boundary) in paths.iter().zip(&outer) {
        add(segment[0], segment[ell - 1], &mut edges);
        if boundary.len() >= 2 {
            for w in boundary.windows(2) {
                add(w[0], w[1], &mut edges);
            }
            add(boundary[boundary.len() - 1], boundary[0], &mut edges);
        }
    }
    let graph = Graph::from_checked(n, edges);

    Ok(LowerBoundFamily {
        graph,
        base,
        path_cycles: paths.clone(),
        outer_cycles: outer,
        paths,
        d,
        ell,
    })
}

fn hamiltonian_cycle_plus_matchings(n: usize, d: usize, seed: Seed) -> Result<Graph> {
    let mut present: HashSet<(Vertex, Vertex)> = HashSet::with_capacity(n * d / 2);
    let mut edges = Vec::with_capacity(n * d / 2);
    for i in 0..n {
        let e = ordered(i, (i + 1) % n);
        present.insert(e);
        edges.push(e);
    }
    let mut rng = seed.stream("graph.lower_bound.matchings", 0);
    let mut order: Vec<Vertex> = (0..n).collect();
    for m in 0..d - 2 {
        let mut ok = false;
        for _ in 0..MATCHING_RETRY_CAP {
            rng.shuffle(&mut order);
            if order
                .chunks_exact(2)
                .all(|p| !present.contains(&ordered(p[0], p[1])))
            {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::SamplingFailure {
                what: format!("perfect matching {m} avoiding existing edges"),
                attempts: MATCHING_RETRY_CAP,
            });
        }
        for p in order.chunks_exact(2) {
            let e = ordered(p[0], p[1]);
            present.insert(e);
            edges.push(e);
        }
    }
    Ok(Graph::from_checked(n, edges))
}

impl LowerBoundFamily {
    /// Checks every structural invariant; returns the first violation found.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let g = &self.graph;
        let n = g.n();
        if (0..n).any(|v| self.base.degree(v) != self.d) {
            return Err("base graph is not d-regular".into());
        }
        for &(u, v) in self.base.edges() {
            if !g.has_edge(u, v) {
                return Err(format!("base edge ({u},{v}) missing from graph"));
            }
        }
        if g.max_degree() > self.d + 2 {
            return Err(format!("max degree {} exceeds d + 2", g.max_degree()));
        }
        let bound = n as f64 / (self.d * self.d * self.ell * self.ell) as f64;
        if (self.paths.len() as f64) < bound.floor() {
            return Err(format!(
                "only {} segments selected, expected at least {}",
                self.paths.len(),
                bound.floor()
            ));
        }
        let mut owner = vec![usize::MAX; n];
        for (i, segment) in self.paths.iter().enumerate() {
            if segment.len() != self.ell {
                return Err(format!("segment {i} has length {}", segment.len()));
            }
            for w in segment.windows(2) {
                if w[1] != w[0] + 1 || !self.base.has_edge(w[0], w[1]) {
                    return Err(format!("segment {i} is not a subpath of the Hamiltonian path"));
                }
            }
            let boundary = self.base.outer_boundary(segment);
            if boundary != self.outer_cycles[i] {
                return Err(format!("segment {i}: outer cycle is not Γ'(P)"));
            }
            for &v in segment.iter().chain(&boundary) {
                if owner[v] != usize::MAX {
                    return Err(format!("segments {} and {i} interact", owner[v]));
                }
                owner[v] = i;
            }
            if !is_cycle_in(g, &self.outer_cycles[i]) {
                return Err(format!("segment {i}: C1 is not a cycle of the graph"));
            }
            if !is_cycle_in(g, &self.path_cycles[i]) {
                return Err(format!("segment {i}: C2 is not a cycle of the graph"));
            }
        }
        Ok(())
    }

    /// Whether the walk, from its first arrival in P ∪ Γ'(P), spends its next
    /// |C1| positions on distinct vertices of C1 and the |C2| positions after
    /// that on distinct vertices of P. When this happens P hangs off the
    /// tree by a single edge.
    pub fn event_ep(&self, i: usize, trace: &WalkTrace) -> bool {
        let (outer, path) = (&self.outer_cycles[i], &self.paths[i]);
        let Some(t) = outer.iter().chain(path).map(|&v| trace.first_visit[v]).min() else {
            return false;
        };
        if t == u64::MAX {
            return false;
        }
        let t = t as usize;
        let (a, b) = (outer.len(), path.len());
        let Some(window) = trace.vertices.get(t..t + a + b) else {
            return false;
        };
        same_set(&window[..a], outer) && same_set(&window[a..], path)
    }

    /// Number of segments whose event holds on this walk.
    pub fn count_events(&self, trace: &WalkTrace) -> usize {
        (0..self.paths.len()).filter(|&i| self.event_ep(i, trace)).count()
    }
}

fn same_set(window: &[Vertex], set: &[Vertex]) -> bool {
    let mut w = window.to_vec();
    w.sort_unstable();
    w.dedup();
    let mut s = set.to_vec();
    s.sort_unstable();
    w == s
}

/// Consecutive vertices (cyclically) adjacent in `g`. Sequences of one or two
/// vertices count as degenerate cycles.
fn is_cycle_in(g: &Graph, cycle: &[Vertex]) -> bool {
    match cycle.len() {
        0 => false,
        1 => true,
        2 => g.has_edge(cycle[0], cycle[1]),
        k => (0..k).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % k])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instance_is_valid() {
        let fam = lower_bound_family(200, 3, 2, Seed(5)).unwrap();
        fam.validate().unwrap();
        assert!(fam.graph.max_degree() <= 5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(lower_bound_family(200, 2, 2, Seed(0)).is_err());
        assert!(lower_bound_family(201, 3, 2, Seed(0)).is_err());
        assert!(lower_bound_family(200, 3, 0, Seed(0)).is_err());
    }

    #[test]
    fn too_tight_when_no_segment_fits() {
        assert!(matches!(
            lower_bound_family(8, 3, 9, Seed(0)),
            Err(Error::ParametersTooTight(_))
        ));
    }

    fn trace(n: usize, walk: &[Vertex]) -> WalkTrace {
        let mut first_visit = vec![u64::MAX; n];
        for (t, &v) in walk.iter().enumerate() {
            if first_visit[v] == u64::MAX {
                first_visit[v] = t as u64;
            }
        }
        WalkTrace {
            vertices: walk.to_vec(),
            first_visit,
            steps: walk.len() as u64 - 1,
        }
    }

    #[test]
    fn event_follows_visit_order() {
        let fam = lower_bound_family(40, 3, 1, Seed(1)).unwrap();
        let (p, c1) = (fam.paths[0][0], fam.outer_cycles[0].clone());
        let outside = (0..40).find(|v| !c1.contains(v) && *v != p && fam.graph.has_edge(*v, c1[0])).unwrap();
        let mut walk = vec![outside];
        walk.extend(&c1);
        walk.push(p);
        assert!(fam.event_ep(0, &trace(40, &walk)));
        // Stepping into P before finishing C1 breaks the event.
        let mut early = vec![outside, c1[0], p];
        early.extend(&c1[1..]);
        assert!(!fam.event_ep(0, &trace(40, &early)));
        // Revisiting a C1 vertex breaks it too.
        let revisit = vec![outside, c1[0], c1[1], c1[0], p];
        assert!(!fam.event_ep(0, &trace(40, &revisit)));
    }

    #[test]
    fn invariants_across_parameters() {
        for (n, d, ell) in [(300, 3, 1), (300, 3, 3), (400, 4, 2), (500, 5, 2)] {
            let fam = lower_bound_family(n, d, ell, Seed(n as u64)).unwrap();
            fam.validate().unwrap_or_else(|e| panic!("{n} {d} {ell}: {e}"));
        }
    }
}
