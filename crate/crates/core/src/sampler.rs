//! Spanning-tree samplers: the Aldous-Broder random walk (uniform trees) and
//! Process B_p, a walk on a random orientation of a random graph whose
//! first-visit trees are close to uniform trees of the complete graph.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{direct_edges_dp, DirectedGraph, Graph, Vertex};
use crate::rng::{map_trials, Seed, Stream};
use crate::stats::Estimate;
use crate::tree::{SpanningTree, WalkTrace};

/// First step cap: 64 · n · ln n · (max degree / min degree). When it trips the
/// graph is checked for connectivity; connected graphs keep walking up to
/// [`extended_step_cap`].
pub fn step_cap(g: &Graph) -> u64 {
    let n = g.n() as f64;
    let min = g.min_degree().max(1) as f64;
    let ratio = g.max_degree() as f64 / min;
    (64.0 * n * n.ln().max(1.0) * ratio).ceil() as u64
}

/// 32 · m · (n - 1): sixteen times the classical 2m(n-1) bound on expected
/// cover time, from any start.
pub fn extended_step_cap(g: &Graph) -> u64 {
    32 * g.m() as u64 * (g.n() as u64).saturating_sub(1).max(1)
}

struct WalkOutput {
    tree: SpanningTree,
    trace: Option<WalkTrace>,
}

fn uniform_walk(g: &Graph, rng: &mut Stream, start: Vertex, record: bool) -> Result<WalkOutput> {
    let n = g.n();
    if start >= n {
        return Err(Error::VertexOutOfRange { vertex: start, n });
    }
    let mut parent = vec![None; n];
    let mut first_visit = vec![u64::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut vertices = Vec::new();
    first_visit[start] = 0;
    order.push(start);
    if record {
        vertices.push(start);
    }
    let mut cap = step_cap(g);
    let mut checked = false;
    let mut current = start;
    let mut steps = 0u64;
    while order.len() < n {
        if steps >= cap {
            if !checked && g.is_connected() {
                checked = true;
                cap = cap.max(extended_step_cap(g));
                continue;
            }
            return Err(Error::NonCover {
                visited: order.len(),
                n,
                steps,
            });
        }
        let nbrs = g.neighbors(current);
        if nbrs.is_empty() {
            return Err(Error::NonCover {
                visited: order.len(),
                n,
                steps,
            });
        }
        let (next, _) = nbrs[rng.index(nbrs.len())];
        steps += 1;
        if first_visit[next] == u64::MAX {
            first_visit[next] = steps;
            parent[next] = Some(current);
            order.push(next);
        }
        if record {
            vertices.push(next);
        }
        current = next;
    }
    let tree = SpanningTree::from_walk(start, parent, &order);
    let trace = record.then_some(WalkTrace {
        vertices,
        first_visit,
        steps,
    });
    Ok(WalkOutput { tree, trace })
}

/// Uniform spanning tree by the Aldous-Broder walk: walk uniformly at random
/// from `start` (default 0) until every vertex has been seen, keeping the
/// edge of each first entry.
pub fn aldous_broder(g: &Graph, seed: Seed, start: Option<Vertex>) -> Result<(SpanningTree, WalkTrace)> {
    let mut rng = seed.stream("tree_sampler.aldous_broder", 0);
    let out = uniform_walk(g, &mut rng, start.unwrap_or(0), true)?;
    Ok((out.tree, out.trace.expect("trace recorded")))
}

/// Same tree as [`aldous_broder`] for the same arguments, without recording
/// the walk.
pub fn aldous_broder_tree(g: &Graph, seed: Seed, start: Option<Vertex>) -> Result<SpanningTree> {
    let mut rng = seed.stream("tree_sampler.aldous_broder", 0);
    Ok(uniform_walk(g, &mut rng, start.unwrap_or(0), false)?.tree)
}

/// Per-tree seed used by [`sample_trees`].
pub fn tree_seed(seed: Seed, index: usize) -> Seed {
    seed.derive("tree_sampler.sample_trees", index as u64)
}

/// `k` independent uniform spanning trees, tree `i` drawn from its own stream.
pub fn sample_trees(g: &Graph, k: usize, seed: Seed) -> Result<Vec<SpanningTree>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    (0..k)
        .map(|i| aldous_broder_tree(g, tree_seed(seed, i), None))
        .collect()
}

/// Fraction of `trials` independent uniform trees that contain edge `{u, v}`.
pub fn edge_inclusion_probability(g: &Graph, u: Vertex, v: Vertex, trials: usize, seed: Seed) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if !g.has_edge(u, v) {
        return Err(Error::MissingEdge(u, v));
    }
    let hits = map_trials(trials, |i| {
        aldous_broder_tree(g, seed.derive("tree_sampler.edge_inclusion", i as u64), None)
            .map(|t| t.contains(u, v))
    });
    let mut count = 0;
    for h in hits {
        count += usize::from(h?);
    }
    Ok(Estimate::proportion(count, trials))
}

/// How Process B_p weighs previously traversed out-arcs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum TraversedRule {
    /// Each previously traversed arc has probability 1/(n-1); every new arc
    /// gets (1 - d1/(n-1)) / (d - d1).
    #[default]
    PerArc,
    /// All previously traversed arcs together have probability 1/(n-1), split
    /// evenly; new arcs share the rest evenly.
    Total,
}

/// Integer step weights at a vertex with out-degree `d`, `d1` of whose arcs
/// were traversed before: `(weight of each old arc, weight of each new arc)`.
/// The weights sum to `d1·old + (d-d1)·new`, and normalizing by that sum gives
/// the step probabilities exactly.
pub fn step_weights(n: usize, d: usize, d1: usize, rule: TraversedRule) -> (u64, u64) {
    assert!(d1 < d && d < n, "need d1 < d <= n - 1");
    let (n, d, d1) = (n as u64, d as u64, d1 as u64);
    match rule {
        // old: 1/(n-1) = (d-d1) / ((n-1)(d-d1)); new: (n-1-d1) / ((n-1)(d-d1)).
        TraversedRule::PerArc => (d - d1, n - 1 - d1),
        TraversedRule::Total if d1 == 0 => (0, 1),
        // old: 1/((n-1) d1) each; new: (n-2)/((n-1)(d-d1)) each; common
        // denominator (n-1)·d1·(d-d1).
        TraversedRule::Total => (d - d1, d1 * (n - 2)),
    }
}

/// Exact step probabilities `(each old arc, each new arc)` as reduced fractions
/// `(numerator, denominator)`.
pub fn step_probabilities(n: usize, d: usize, d1: usize, rule: TraversedRule) -> ((u64, u64), (u64, u64)) {
    let (old, new) = step_weights(n, d, d1, rule);
    let total = old * d1 as u64 + new * (d - d1) as u64;
    let reduce = |a: u64, b: u64| {
        let g = gcd(a, b).max(1);
        (a / g, b / g)
    };
    (reduce(old, total), reduce(new, total))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Debug, Serialize)]
pub enum BpOutcome {
    Success { tree: SpanningTree, trace: WalkTrace },
    Failure { stuck: Vertex, steps: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct ProcessBResult {
    pub outcome: BpOutcome,
    #[serde(skip)]
    pub oriented: DirectedGraph,
}

impl ProcessBResult {
    pub fn tree(&self) -> Option<&SpanningTree> {
        match &self.outcome {
            BpOutcome::Success { tree, .. } => Some(tree),
            BpOutcome::Failure { .. } => None,
        }
    }

    pub fn succeeded(&self) -> bool {
        matches!(self.outcome, BpOutcome::Success { .. })
    }
}

/// Walk state over a fixed orientation. Out-arcs of each vertex are kept
/// partitioned: the first `used[v]` entries of `arcs[v]` are the arcs already
/// traversed.
struct BpWalker {
    n: usize,
    arcs: Vec<Vec<Vertex>>,
    used: Vec<usize>,
    rule: TraversedRule,
}

enum Phase {
    Covered { tree: SpanningTree, trace: WalkTrace, end: Vertex },
    Stuck { stuck: Vertex, steps: u64 },
}

impl BpWalker {
    fn new(d: &DirectedGraph, rule: TraversedRule) -> Self {
        let arcs = (0..d.n())
            .map(|v| d.out_arcs(v).iter().map(|&(w, _)| w).collect())
            .collect();
        BpWalker {
            n: d.n(),
            arcs,
            used: vec![0; d.n()],
            rule,
        }
    }

    fn step(&mut self, v: Vertex, rng: &mut Stream) -> Option<Vertex> {
        let d = self.arcs[v].len();
        let d1 = self.used[v];
        if d1 == d {
            return None;
        }
        let (old_w, new_w) = step_weights(self.n, d, d1, self.rule);
        let old_total = old_w * d1 as u64;
        let total = old_total + new_w * (d - d1) as u64;
        debug_assert!(self.rule != TraversedRule::PerArc || total == ((d - d1) * (self.n - 1)) as u64);
        let r = rng.below(total);
        if r < old_total {
            Some(self.arcs[v][(r / old_w) as usize])
        } else {
            let i = d1 + ((r - old_total) / new_w) as usize;
            self.arcs[v].swap(i, d1);
            self.used[v] += 1;
            Some(self.arcs[v][d1])
        }
    }

    /// Walks from `start` until all vertices are visited (in this phase) or the
    /// walk is stuck at a vertex whose out-arcs are all used.
    fn cover(&mut self, start: Vertex, rng: &mut Stream) -> Phase {
        let n = self.n;
        let mut parent = vec![None; n];
        let mut first_visit = vec![u64::MAX; n];
        let mut order = vec![start];
        let mut vertices = vec![start];
        first_visit[start] = 0;
        let mut current = start;
        let mut steps = 0u64;
        while order.len() < n {
            let Some(next) = self.step(current, rng) else {
                return Phase::Stuck {
                    stuck: current,
                    steps,
                };
            };
            steps += 1;
            if first_visit[next] == u64::MAX {
                first_visit[next] = steps;
                parent[next] = Some(current);
                order.push(next);
            }
            vertices.push(next);
            current = next;
        }
        Phase::Covered {
            tree: SpanningTree::from_walk(start, parent, &order),
            trace: WalkTrace {
                vertices,
                first_visit,
                steps,
            },
            end: current,
        }
    }
}

fn check_bp_args(h: &Graph, p: f64, start: Vertex) -> Result<()> {
    if h.n() < 2 {
        return Err(Error::InvalidSize("process B_p needs n >= 2".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("process B_p needs 0 < p <= 1, got {p}")));
    }
    if start >= h.n() {
        return Err(Error::VertexOutOfRange { vertex: start, n: h.n() });
    }
    Ok(())
}

/// Process B_p from `start` on D_p(H), with the per-arc rule.
pub fn process_bp(h: &Graph, p: f64, seed: Seed, start: Vertex) -> Result<ProcessBResult> {
    process_bp_with_rule(h, p, seed, start, TraversedRule::PerArc)
}

pub fn process_bp_with_rule(h: &Graph, p: f64, seed: Seed, start: Vertex, rule: TraversedRule) -> Result<ProcessBResult> {
    check_bp_args(h, p, start)?;
    let oriented = direct_edges_dp(h, p, seed.derive("tree_sampler.process_bp.orient", 0))?;
    let mut rng = seed.stream("tree_sampler.process_bp.walk", 0);
    let mut walker = BpWalker::new(&oriented, rule);
    let outcome = match walker.cover(start, &mut rng) {
        Phase::Covered { tree, trace, .. } => BpOutcome::Success { tree, trace },
        Phase::Stuck { stuck, steps } => BpOutcome::Failure { stuck, steps },
    };
    Ok(ProcessBResult { outcome, oriented })
}

/// Failure of one of the two phases of [`sequential_two_trees_bp`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BpFailure {
    /// 1 for the first tree, 2 for the second.
    pub phase: usize,
    pub stuck: Vertex,
    pub steps: u64,
}

/// Two trees cut from one continuous Process B_p walk started at vertex 0:
/// the first tree is read off until the first cover, then first-visit
/// bookkeeping restarts at the current position for the second tree.
/// Traversed-arc history carries over between the phases.
pub fn sequential_two_trees_bp(
    h: &Graph,
    p: f64,
    seed: Seed,
) -> Result<std::result::Result<(SpanningTree, SpanningTree), BpFailure>> {
    check_bp_args(h, p, 0)?;
    let oriented = direct_edges_dp(h, p, seed.derive("tree_sampler.sequential_bp.orient", 0))?;
    let mut rng = seed.stream("tree_sampler.sequential_bp.walk", 0);
    let mut walker = BpWalker::new(&oriented, TraversedRule::PerArc);
    let (first, end) = match walker.cover(0, &mut rng) {
        Phase::Covered { tree, end, .. } => (tree, end),
        Phase::Stuck { stuck, steps } => return Ok(Err(BpFailure { phase: 1, stuck, steps })),
    };
    match walker.cover(end, &mut rng) {
        Phase::Covered { tree, .. } => Ok(Ok((first, tree))),
        Phase::Stuck { stuck, steps } => Ok(Err(BpFailure { phase: 2, stuck, steps })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, path_graph, petersen_graph, star_graph};

    #[test]
    fn tree_input_returns_itself() {
        let g = path_graph(8).unwrap();
        for s in 0..20 {
            let (t, trace) = aldous_broder(&g, Seed(s), Some(3)).unwrap();
            assert_eq!(t.canonical_edges(), g.edges().to_vec());
            assert!(t.consistent_with(&trace));
        }
        let star = star_graph(5).unwrap();
        let t = aldous_broder_tree(&star, Seed(1), Some(2)).unwrap();
        assert_eq!(t.canonical_edges(), star.edges().to_vec());
    }

    #[test]
    fn trace_and_tree_agree() {
        let g = petersen_graph();
        for s in 0..50 {
            let (t, trace) = aldous_broder(&g, Seed(s), None).unwrap();
            t.validate().unwrap();
            assert!(t.consistent_with(&trace));
            assert_eq!(trace.distinct(), 10);
            assert_eq!(trace.vertices.len() as u64, trace.steps + 1);
            for w in trace.vertices.windows(2) {
                assert!(g.has_edge(w[0], w[1]));
            }
            assert_eq!(aldous_broder_tree(&g, Seed(s), None).unwrap(), t);
        }
    }

    #[test]
    fn disconnected_graph_reports_non_cover() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        match aldous_broder(&g, Seed(0), None) {
            Err(Error::NonCover { visited, n, .. }) => assert_eq!((visited, n), (2, 4)),
            other => panic!("{other:?}"),
        }
        let isolated = Graph::from_edges(3, [(1, 2)]).unwrap();
        assert!(matches!(
            aldous_broder(&isolated, Seed(0), None),
            Err(Error::NonCover { .. })
        ));
    }

    #[test]
    fn long_path_covers_beyond_first_cap() {
        // Cover time of a path from one end is about n², above the first cap.
        let g = path_graph(1000).unwrap();
        assert!(step_cap(&g) < 1_000_000);
        let t = aldous_broder_tree(&g, Seed(3), Some(0)).unwrap();
        t.validate().unwrap();
    }

    #[test]
    fn step_probabilities_sum_to_one() {
        // n = 5, d = 3, d1 = 1: old 1/4, new 3/8 each.
        let (old, new) = step_probabilities(5, 3, 1, TraversedRule::PerArc);
        assert_eq!(old, (1, 4));
        assert_eq!(new, (3, 8));
        for n in 2..12 {
            for d in 1..n {
                for d1 in 0..d {
                    for rule in [TraversedRule::PerArc, TraversedRule::Total] {
                        let (o, w) = step_weights(n, d, d1, rule);
                        let total = o * d1 as u64 + w * (d - d1) as u64;
                        let ((on, od), (nn, nd)) = step_probabilities(n, d, d1, rule);
                        // d1·on/od + (d-d1)·nn/nd == 1
                        let lhs = d1 as u128 * on as u128 * nd as u128
                            + (d - d1) as u128 * nn as u128 * od as u128;
                        assert_eq!(lhs, od as u128 * nd as u128, "n={n} d={d} d1={d1} {rule:?}");
                        assert!(total > 0);
                    }
                    if d1 > 0 {
                        // PerArc: each old arc exactly 1/(n-1).
                        let ((on, od), _) = step_probabilities(n, d, d1, TraversedRule::PerArc);
                        assert_eq!(on as u128 * (n as u128 - 1), od as u128);
                    }
                }
            }
        }
    }

    #[test]
    fn complete_graph_at_p_one_is_uniform_walk() {
        let n = 7;
        let d = complete_graph(n).unwrap();
        for d1 in 0..n - 1 {
            let (o, w) = step_probabilities(n, n - 1, d1, TraversedRule::PerArc);
            if d1 > 0 {
                assert_eq!(o, (1, (n - 1) as u64));
            }
            assert_eq!(w, (1, (n - 1) as u64));
        }
        let r = process_bp(&d, 1.0, Seed(1), 0).unwrap();
        assert!(r.succeeded());
        let tree = r.tree().unwrap();
        tree.validate().unwrap();
    }

    #[test]
    fn process_bp_argument_errors() {
        let g = complete_graph(5).unwrap();
        assert!(process_bp(&g, 0.0, Seed(0), 0).is_err());
        assert!(process_bp(&g, 1.1, Seed(0), 0).is_err());
        assert!(process_bp(&g, 0.5, Seed(0), 5).is_err());
        assert!(process_bp(&Graph::empty(1), 0.5, Seed(0), 0).is_err());
    }

    #[test]
    fn process_bp_fails_on_isolated_start() {
        let g = Graph::from_edges(3, [(1, 2)]).unwrap();
        let r = process_bp(&g, 1.0, Seed(0), 0).unwrap();
        match r.outcome {
            BpOutcome::Failure { stuck, steps } => assert_eq!((stuck, steps), (0, 0)),
            _ => panic!("isolated start must fail"),
        }
    }

    #[test]
    fn process_bp_failures_only_when_stuck() {
        let h = cycle_graph(12).unwrap();
        for s in 0..200 {
            let r = process_bp(&h, 0.5, Seed(s), 0).unwrap();
            match &r.outcome {
                BpOutcome::Success { tree, trace } => {
                    tree.validate().unwrap();
                    assert!(tree.consistent_with(trace));
                    for w in trace.vertices.windows(2) {
                        assert!(r.oriented.out_arcs(w[0]).iter().any(|&(x, _)| x == w[1]));
                    }
                }
                BpOutcome::Failure { .. } => {}
            }
        }
    }

    #[test]
    fn stuck_vertex_has_used_every_out_arc() {
        let h = cycle_graph(12).unwrap();
        let mut failures = 0;
        for s in 0..200 {
            let oriented = direct_edges_dp(&h, 0.5, Seed(s)).unwrap();
            let mut walker = BpWalker::new(&oriented, TraversedRule::PerArc);
            let mut rng = Seed(s).stream("walk", 0);
            if let Phase::Stuck { stuck, .. } = walker.cover(0, &mut rng) {
                failures += 1;
                assert_eq!(walker.used[stuck], walker.arcs[stuck].len());
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn sequential_trees_span() {
        let k = complete_graph(16).unwrap();
        let (a, b) = sequential_two_trees_bp(&k, 1.0, Seed(5)).unwrap().unwrap();
        a.validate().unwrap();
        b.validate().unwrap();
        assert_eq!(a.root(), 0);
    }

    #[test]
    fn sample_trees_first_is_its_own_stream() {
        let g = petersen_graph();
        let ts = sample_trees(&g, 3, Seed(11)).unwrap();
        assert_eq!(ts.len(), 3);
        assert_eq!(ts[0], aldous_broder_tree(&g, tree_seed(Seed(11), 0), None).unwrap());
        assert!(sample_trees(&g, 0, Seed(11)).is_err());
    }

    #[test]
    fn bridge_inclusion_is_one() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        let est = edge_inclusion_probability(&g, 2, 3, 200, Seed(0)).unwrap();
        assert_eq!(est.value, 1.0);
        assert!(edge_inclusion_probability(&g, 0, 4, 10, Seed(0)).is_err());
    }
}
