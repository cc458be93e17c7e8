//! Next-hop routing over the trees of a splicer, switching trees around
//! failed edges, and the stretch of splicer distances.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ordered, Graph, Vertex};
use crate::rng::{map_trials, Seed};
use crate::splicer::{splice, Splicer};
use crate::stats::Estimate;
use crate::tree::SpanningTree;

const NONE: u32 = u32::MAX;

/// Largest support for which [`stretch_stats`] computes the exact diameter.
pub const DIAMETER_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchPolicy {
    /// Candidate trees in a fresh random order at every blocked hop.
    Random,
    /// Candidate trees in cyclic order after the current one.
    RoundRobin,
}

/// Per-tree, per-destination next-hop tables plus a set of failed edges.
#[derive(Clone, Debug)]
pub struct RoutingState {
    n: usize,
    k: usize,
    /// `next[(t * n + dst) * n + v]`, `NONE` at `v == dst`.
    next: Arc<Vec<u32>>,
    failed: HashSet<(Vertex, Vertex)>,
}

impl RoutingState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn next_hop(&self, tree: usize, dst: Vertex, v: Vertex) -> Option<Vertex> {
        let h = self.next[(tree * self.n + dst) * self.n + v];
        (h != NONE).then_some(h as Vertex)
    }

    /// Number of defined next-hop entries; always `k·n·(n-1)`.
    pub fn defined_entries(&self) -> usize {
        self.next.iter().filter(|&&h| h != NONE).count()
    }

    /// Same tables with `failed` as the failure set. The tables are shared.
    pub fn with_failures<I: IntoIterator<Item = (Vertex, Vertex)>>(&self, failed: I) -> RoutingState {
        RoutingState {
            n: self.n,
            k: self.k,
            next: Arc::clone(&self.next),
            failed: failed.into_iter().map(|(u, v)| ordered(u, v)).collect(),
        }
    }

    pub fn is_failed(&self, u: Vertex, v: Vertex) -> bool {
        self.failed.contains(&ordered(u, v))
    }
}

/// Tables for every (tree, destination) by one BFS of the tree from the destination.
pub fn build_routing(trees: &[SpanningTree]) -> Result<RoutingState> {
    let Some(first) = trees.first() else {
        return Err(Error::InvalidParameter("need at least one tree".into()));
    };
    let n = first.n();
    if trees.iter().any(|t| t.n() != n) {
        return Err(Error::InvalidParameter("trees span different vertex counts".into()));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidSize(format!("{n} vertices")));
    }
    let k = trees.len();
    let tables = map_trials(k, |t| {
        let adj = trees[t].as_graph();
        let mut table = vec![NONE; n * n];
        let mut queue = VecDeque::new();
        for dst in 0..n {
            let row = &mut table[dst * n..(dst + 1) * n];
            let mut seen = vec![false; n];
            seen[dst] = true;
            queue.push_back(dst);
            while let Some(v) = queue.pop_front() {
                for &(w, _) in adj.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        row[w] = v as u32;
                        queue.push_back(w);
                    }
                }
            }
        }
        table
    });
    Ok(RoutingState {
        n,
        k,
        next: Arc::new(tables.concat()),
        failed: HashSet::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RouteResult {
    pub delivered: bool,
    pub hops: usize,
    pub switches: usize,
    pub path: Vec<Vertex>,
}

/// Routes a packet from `src` to `dst` starting on tree 0. At each vertex the
/// current tree's next hop is taken if its edge is up; otherwise another tree
/// whose next hop is up is chosen per `policy`. A (vertex, tree) pair is
/// never departed from twice, which bounds loops; `hop_cap` bounds the rest.
pub fn route(state: &RoutingState, src: Vertex, dst: Vertex, policy: SwitchPolicy, hop_cap: usize, seed: Seed) -> Result<RouteResult> {
    let n = state.n;
    for v in [src, dst] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    if src == dst {
        return Err(Error::InvalidParameter("src and dst must differ".into()));
    }
    if hop_cap < 1 {
        return Err(Error::InvalidParameter("hop_cap must be >= 1".into()));
    }
    let k = state.k;
    let mut departed: HashSet<(Vertex, usize)> = HashSet::new();
    let mut path = vec![src];
    let (mut v, mut tree, mut switches) = (src, 0usize, 0usize);
    let usable = |v: Vertex, t: usize, departed: &HashSet<(Vertex, usize)>| {
        let h = state.next_hop(t, dst, v).expect("v != dst");
        (!state.is_failed(v, h) && !departed.contains(&(v, t))).then_some(h)
    };
    while v != dst {
        if path.len() > hop_cap {
            break;
        }
        let hop = path.len() - 1;
        let mut choice = usable(v, tree, &departed).map(|h| (tree, h));
        if choice.is_none() {
            let mut order: Vec<usize> = match policy {
                SwitchPolicy::RoundRobin => (1..k).map(|i| (tree + i) % k).collect(),
                SwitchPolicy::Random => (0..k).filter(|&t| t != tree).collect(),
            };
            if policy == SwitchPolicy::Random {
                seed.stream("route.route", hop as u64).shuffle(&mut order);
            }
            choice = order.into_iter().find_map(|t| usable(v, t, &departed).map(|h| (t, h)));
            if choice.is_some() {
                switches += 1;
            }
        }
        let Some((t, h)) = choice else { break };
        departed.insert((v, t));
        tree = t;
        v = h;
        path.push(v);
    }
    let delivered = v == dst;
    Ok(RouteResult {
        delivered,
        hops: path.len() - 1,
        switches,
        path,
    })
}

/// One row per trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReliabilityTrial {
    pub trial: usize,
    pub seed: u64,
    pub failure_prob: f64,
    pub delivered_fraction: f64,
    pub ceiling_fraction: f64,
    pub mean_hops: f64,
    pub mean_switches: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReliabilitySummary {
    pub k: usize,
    pub failure_prob: f64,
    pub pairs: usize,
    pub delivered: Estimate,
    pub ceiling: Estimate,
    pub rows: Vec<ReliabilityTrial>,
}

/// Per trial: splice `k` trees, fail every base edge with `failure_prob`,
/// route `pairs` random pairs, and compare with the fraction of those pairs
/// still connected in the damaged base graph. Failures and pairs depend only
/// on the trial seed, so runs with different `k` see identical damage.
pub fn reliability_experiment(
    g: &Graph,
    k: usize,
    failure_prob: f64,
    pairs: usize,
    trials: usize,
    seed: Seed,
) -> Result<ReliabilitySummary> {
    if !(0.0..=1.0).contains(&failure_prob) {
        return Err(Error::InvalidParameter(format!("failure_prob = {failure_prob} outside [0, 1]")));
    }
    if k == 0 || pairs == 0 || trials == 0 {
        return Err(Error::InvalidParameter("k, pairs and trials must be >= 1".into()));
    }
    if g.n() < 2 || !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let n = g.n();
    let rows = (0..trials)
        .map(|trial| -> Result<ReliabilityTrial> {
            let ts = seed.derive("route.reliability", trial as u64);
            let splicer = splice(g, k, ts)?;
            let state = build_routing(splicer.trees())?;
            let mut fail_rng = ts.stream("route.failures", 0);
            let removed: Vec<bool> = (0..g.m()).map(|_| fail_rng.bernoulli(failure_prob)).collect();
            let damaged = g.without_edges(&removed);
            let comp = damaged.components();
            let state = state.with_failures((0..g.m()).filter(|&e| removed[e]).map(|e| g.edge(e)));
            let mut pair_rng = ts.stream("route.pairs", 0);
            let pair_list: Vec<(Vertex, Vertex)> = (0..pairs)
                .map(|_| {
                    let s = pair_rng.index(n);
                    let mut d = pair_rng.index(n - 1);
                    if d >= s {
                        d += 1;
                    }
                    (s, d)
                })
                .collect();
            let results = map_trials(pairs, |j| {
                let (s, d) = pair_list[j];
                route(&state, s, d, SwitchPolicy::Random, 4 * n, ts.derive("route.route", j as u64))
            });
            let (mut delivered, mut connected, mut hops, mut switches) = (0usize, 0usize, 0usize, 0usize);
            for (j, r) in results.into_iter().enumerate() {
                let r = r?;
                let (s, d) = pair_list[j];
                connected += usize::from(comp[s] == comp[d]);
                if r.delivered {
                    delivered += 1;
                    hops += r.hops;
                    switches += r.switches;
                }
            }
            let per = |x: usize| if delivered > 0 { x as f64 / delivered as f64 } else { 0.0 };
            Ok(ReliabilityTrial {
                trial,
                seed: ts.0,
                failure_prob,
                delivered_fraction: delivered as f64 / pairs as f64,
                ceiling_fraction: connected as f64 / pairs as f64,
                mean_hops: per(hops),
                mean_switches: per(switches),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let delivered: Vec<f64> = rows.iter().map(|r| r.delivered_fraction).collect();
    let ceiling: Vec<f64> = rows.iter().map(|r| r.ceiling_fraction).collect();
    Ok(ReliabilitySummary {
        k,
        failure_prob,
        pairs,
        delivered: Estimate::mean(&delivered),
        ceiling: Estimate::mean(&ceiling),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StretchStats {
    /// Mean of dist_splicer(u, v) / dist_G(u, v) over the sampled pairs.
    pub mean_stretch: Estimate,
    /// Exact support diameter (None above [`DIAMETER_LIMIT`]).
    pub diameter: Option<usize>,
}

/// Stretch of splicer distances against base distances over `pairs` random
/// pairs, plus the exact support diameter.
pub fn stretch_stats(g: &Graph, splicer: &Splicer, pairs: usize, seed: Seed) -> Result<StretchStats> {
    let s = splicer.support();
    if g.n() != s.n() {
        return Err(Error::InvalidParameter("splicer and graph differ in vertex count".into()));
    }
    if pairs == 0 {
        return Err(Error::InvalidParameter("pairs must be >= 1".into()));
    }
    if g.n() < 2 || !g.is_connected() || !s.is_connected() {
        return Err(Error::NotConnected);
    }
    let n = g.n();
    let mut rng = seed.stream("route.stretch", 0);
    let mut list: Vec<(Vertex, Vertex)> = (0..pairs)
        .map(|_| {
            let a = rng.index(n);
            let mut b = rng.index(n - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        })
        .collect();
    list.sort_unstable();
    let mut groups: Vec<(Vertex, Vec<Vertex>)> = Vec::new();
    for &(a, b) in &list {
        match groups.last_mut() {
            Some((src, targets)) if *src == a => targets.push(b),
            _ => groups.push((a, vec![b])),
        }
    }
    let per_source = map_trials(groups.len(), |i| {
        let (src, targets) = &groups[i];
        let dg = distances_to(g, *src, targets);
        let ds = distances_to(s, *src, targets);
        dg.iter().zip(&ds).map(|(&x, &y)| y as f64 / x as f64).collect::<Vec<f64>>()
    });
    let ratios: Vec<f64> = per_source.concat();
    let diameter = (n <= DIAMETER_LIMIT).then(|| {
        map_trials(n, |v| s.bfs_distances(v).into_iter().max().unwrap_or(0))
            .into_iter()
            .max()
            .unwrap_or(0)
    });
    Ok(StretchStats {
        mean_stretch: Estimate::mean(&ratios),
        diameter,
    })
}

/// BFS distances from `src` to each of `targets`, stopping as soon as all
/// of them have been reached.
fn distances_to(g: &Graph, src: Vertex, targets: &[Vertex]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut wanted = vec![false; g.n()];
    let mut remaining = 0;
    for &t in targets {
        if !wanted[t] {
            wanted[t] = true;
            remaining += 1;
        }
    }
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    'bfs: while let Some(u) = queue.pop_front() {
        for &(w, _) in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                if wanted[w] {
                    remaining -= 1;
                    if remaining == 0 {
                        break 'bfs;
                    }
                }
                queue.push_back(w);
            }
        }
    }
    targets.iter().map(|&t| dist[t]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, path_graph};
    use crate::splicer::union_trees;

    fn tree(n: usize, edges: &[(usize, usize)]) -> SpanningTree {
        SpanningTree::from_edges(n, 0, edges).unwrap()
    }

    fn tree_distance(t: &SpanningTree, a: Vertex, b: Vertex) -> usize {
        t.as_graph().bfs_distances(a)[b]
    }

    #[test]
    fn path_tree_next_hops() {
        let t = tree(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let s = build_routing(&[t]).unwrap();
        for dst in 0..5 {
            for v in 0..5 {
                let want = match v.cmp(&dst) {
                    std::cmp::Ordering::Less => Some(v + 1),
                    std::cmp::Ordering::Greater => Some(v - 1),
                    std::cmp::Ordering::Equal => None,
                };
                assert_eq!(s.next_hop(0, dst, v), want);
            }
        }
        assert_eq!(s.defined_entries(), 5 * 4);
    }

    #[test]
    fn star_leaves_go_through_center() {
        let t = tree(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let s = build_routing(&[t]).unwrap();
        for dst in 0..5 {
            for v in 1..5 {
                if v != dst {
                    assert_eq!(s.next_hop(0, dst, v), Some(0));
                }
            }
        }
    }

    #[test]
    fn healthy_single_tree_uses_tree_distance() {
        let g = complete_graph(30).unwrap();
        let sp = splice(&g, 1, Seed(4)).unwrap();
        let s = build_routing(sp.trees()).unwrap();
        assert_eq!(s.defined_entries(), 30 * 29);
        for (a, b) in [(0, 29), (3, 17), (12, 5)] {
            let r = route(&s, a, b, SwitchPolicy::Random, 120, Seed(0)).unwrap();
            assert!(r.delivered);
            assert_eq!(r.hops, tree_distance(&sp.trees()[0], a, b));
            assert_eq!(r.switches, 0);
        }
    }

    #[test]
    fn switches_to_intact_tree() {
        let a = tree(4, &[(0, 1), (1, 2), (2, 3)]);
        let b = tree(4, &[(0, 2), (0, 3), (1, 3)]);
        let s = build_routing(&[a.clone(), b]).unwrap().with_failures(a.edges().to_vec());
        for policy in [SwitchPolicy::Random, SwitchPolicy::RoundRobin] {
            let r = route(&s, 0, 3, policy, 16, Seed(1)).unwrap();
            assert!(r.delivered);
            assert!(r.switches >= 1);
            for w in r.path.windows(2) {
                assert!(!s.is_failed(w[0], w[1]));
            }
        }
    }

    #[test]
    fn blocked_at_source() {
        let a = tree(4, &[(0, 1), (1, 2), (2, 3)]);
        let b = tree(4, &[(0, 2), (0, 3), (1, 3)]);
        let s = build_routing(&[a, b]).unwrap().with_failures([(0, 1), (0, 3)]);
        let r = route(&s, 0, 3, SwitchPolicy::Random, 16, Seed(1)).unwrap();
        assert!(!r.delivered);
        assert_eq!(r.hops, 0);
        assert!(route(&s, 0, 0, SwitchPolicy::Random, 16, Seed(1)).is_err());
        assert!(route(&s, 0, 3, SwitchPolicy::Random, 0, Seed(1)).is_err());
    }

    #[test]
    fn reliability_extremes() {
        let g = complete_graph(20).unwrap();
        let up = reliability_experiment(&g, 2, 0.0, 30, 3, Seed(2)).unwrap();
        assert_eq!(up.delivered.value, 1.0);
        let down = reliability_experiment(&g, 2, 1.0, 30, 3, Seed(2)).unwrap();
        assert_eq!(down.delivered.value, 0.0);
        let mid = reliability_experiment(&g, 2, 0.2, 30, 5, Seed(2)).unwrap();
        for r in &mid.rows {
            assert!(r.delivered_fraction <= r.ceiling_fraction);
        }
    }

    #[test]
    fn stretch_of_graph_itself_is_one() {
        let g = path_graph(12).unwrap();
        let sp = union_trees(vec![tree(12, g.edges())]).unwrap();
        let st = stretch_stats(&g, &sp, 50, Seed(0)).unwrap();
        assert_eq!(st.mean_stretch.value, 1.0);
        assert_eq!(st.diameter, Some(11));
    }
}
