//! Expansion and cut-ratio measurement: exhaustive scans for small graphs,
//! a spectral certificate for large ones, and sampled cut families comparing a
//! base graph with a splicer or sparsifier.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::rng::{map_trials, Seed, Stream};
use crate::sampler::aldous_broder_tree;
use crate::splicer::{Splicer, WeightedGraph};

pub use crate::spectral::{spectral_lower_bound, SpectralReport};

/// Largest vertex count accepted by the exhaustive scans.
pub const EXACT_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionKind {
    Edge,
    Vertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    SpectralBound,
    Sampled,
}

/// Minimum ratio found, as an exact fraction plus its witness set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub kind: ExpansionKind,
    pub value: f64,
    pub numerator: usize,
    pub denominator: usize,
    /// Sorted vertex list with `1 <= len <= n/2`.
    pub witness: Vec<Vertex>,
    pub method: Method,
}

/// `|δ(A)|` or `|Γ'(A)|` for the given set.
pub fn expansion_numerator(g: &Graph, kind: ExpansionKind, set: &[Vertex]) -> usize {
    match kind {
        ExpansionKind::Edge => {
            let mut mask = vec![false; g.n()];
            for &v in set {
                mask[v] = true;
            }
            g.cut_size(set, &mask)
        }
        ExpansionKind::Vertex => g.outer_boundary(set).len(),
    }
}

fn check_exact(g: &Graph) -> Result<()> {
    if g.n() > EXACT_LIMIT {
        return Err(Error::TooLarge {
            what: "exhaustive expansion",
            limit: EXACT_LIMIT,
            got: g.n(),
            hint: "use the spectral bound or sampled cuts for larger graphs",
        });
    }
    if g.n() < 2 {
        return Err(Error::InvalidSize("expansion needs n >= 2".into()));
    }
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    Ok(())
}

/// Exact edge expansion by scanning every vertex set.
pub fn edge_expansion_exact(g: &Graph) -> Result<ExpansionReport> {
    expansion_exact(g, ExpansionKind::Edge)
}

/// Exact vertex expansion by scanning every vertex set.
pub fn vertex_expansion_exact(g: &Graph) -> Result<ExpansionReport> {
    expansion_exact(g, ExpansionKind::Vertex)
}

/// Scans the 2^(n-1) sets containing vertex 0; each set and its complement
/// are both considered when their size is at most n/2, which covers every
/// candidate A exactly once or twice.
fn expansion_exact(g: &Graph, kind: ExpansionKind) -> Result<ExpansionReport> {
    check_exact(g)?;
    let n = g.n();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &(w, _)| m | (1 << w)))
        .collect();
    let half = n / 2;
    let mut best: Option<(usize, usize, u32)> = None;
    let mut consider = |num: usize, den: usize, set: u32| {
        let better = match best {
            None => true,
            Some((bn, bd, _)) => num * bd < bn * den,
        };
        if better {
            best = Some((num, den, set));
        }
    };
    for rest in 0u32..(1u32 << (n - 1)) {
        let a = (rest << 1) | 1;
        let comp = full & !a;
        let size_a = a.count_ones() as usize;
        let size_c = n - size_a;
        match kind {
            ExpansionKind::Edge => {
                let mut cut = 0usize;
                let mut bits = a;
                while bits != 0 {
                    let v = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    cut += (adj[v] & comp).count_ones() as usize;
                }
                if size_a <= half {
                    consider(cut, size_a, a);
                }
                if size_c >= 1 && size_c <= half {
                    consider(cut, size_c, comp);
                }
            }
            ExpansionKind::Vertex => {
                let (mut na, mut nc) = (0u32, 0u32);
                for v in 0..n {
                    if a & (1 << v) != 0 {
                        na |= adj[v];
                    } else {
                        nc |= adj[v];
                    }
                }
                if size_a <= half {
                    consider((na & comp).count_ones() as usize, size_a, a);
                }
                if size_c >= 1 && size_c <= half {
                    consider((nc & a).count_ones() as usize, size_c, comp);
                }
            }
        }
    }
    let (num, den, set) = best.expect("n >= 2 has a set of size 1");
    Ok(ExpansionReport {
        kind,
        value: num as f64 / den as f64,
        numerator: num,
        denominator: den,
        witness: (0..n).filter(|&v| set & (1 << v) != 0).collect(),
        method: Method::Exact,
    })
}

/// The cut families used as a sampled surrogate for "every cut".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutFamily {
    /// Uniform random subset of size 1, 2, 4, ... or ⌊n/2⌋.
    SizeClass,
    /// A single minimum-degree vertex.
    MinDegree,
    /// Smaller side after deleting one edge of a fresh uniform spanning tree.
    TreeInduced,
    /// BFS ball of radius 1..=3 around a random center.
    BfsBall,
}

/// What a base graph's cuts are compared against.
#[derive(Clone, Copy, Debug)]
pub enum Derived<'a> {
    Graph(&'a Graph),
    Splicer(&'a Splicer),
    Weighted(&'a WeightedGraph),
}

impl Derived<'_> {
    fn n(&self) -> usize {
        match self {
            Derived::Graph(g) => g.n(),
            Derived::Splicer(s) => s.n(),
            Derived::Weighted(w) => w.graph().n(),
        }
    }

    fn cut(&self, members: &[Vertex], mask: &[bool]) -> f64 {
        match self {
            Derived::Graph(g) => g.cut_size(members, mask) as f64,
            Derived::Splicer(s) => s.cut_size(members, mask) as f64,
            Derived::Weighted(w) => w.cut_weight(members, mask),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutRatioSample {
    pub family: CutFamily,
    /// Sorted members of A, `1 <= |A| <= n/2`.
    pub set: Vec<Vertex>,
    pub base_cut: usize,
    pub derived_cut: f64,
    pub ratio: f64,
}

/// Cut sets drawn from the four families. All minimum-degree singletons come
/// first; the remaining budget cycles through size classes, tree-induced cuts
/// and BFS balls. Sample `i` uses its own substream.
pub fn sample_cut_sets(g: &Graph, samples: usize, seed: Seed) -> Result<Vec<(CutFamily, Vec<Vertex>)>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    if g.n() < 2 || !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let n = g.n();
    let min_deg = g.min_degree();
    let mut out: Vec<(CutFamily, Vec<Vertex>)> = (0..n)
        .filter(|&v| g.degree(v) == min_deg)
        .take(samples)
        .map(|v| (CutFamily::MinDegree, vec![v]))
        .collect();
    let classes = size_classes(n);
    let remaining = samples - out.len();
    let drawn = map_trials(remaining, |i| {
        let mut rng = seed.stream("cuts.sampled", i as u64);
        match i % 3 {
            0 => {
                let size = classes[(i / 3) % classes.len()];
                Ok((CutFamily::SizeClass, random_subset(n, size, &mut rng)))
            }
            1 => {
                let tree = aldous_broder_tree(g, seed.derive("cuts.tree", i as u64), Some(rng.index(n)))?;
                let mut v = rng.index(n);
                while v == tree.root() {
                    v = rng.index(n);
                }
                Ok((CutFamily::TreeInduced, smaller_side(n, tree.subtree(v))))
            }
            _ => {
                let radius = 1 + (i / 3) % 3;
                let center = rng.index(n);
                Ok((CutFamily::BfsBall, bfs_ball(g, center, radius)))
            }
        }
    });
    for d in drawn {
        out.push(d?);
    }
    Ok(out)
}

fn size_classes(n: usize) -> Vec<usize> {
    let half = n / 2;
    let mut sizes: Vec<usize> = std::iter::successors(Some(1usize), |&s| Some(s * 2))
        .take_while(|&s| s <= half)
        .collect();
    if sizes.last() != Some(&half) && half >= 1 {
        sizes.push(half);
    }
    sizes
}

fn random_subset(n: usize, size: usize, rng: &mut Stream) -> Vec<Vertex> {
    let mut pool: Vec<Vertex> = (0..n).collect();
    for i in 0..size {
        let j = i + rng.index(n - i);
        pool.swap(i, j);
    }
    let mut set = pool[..size].to_vec();
    set.sort_unstable();
    set
}

/// The side with at most n/2 vertices, sorted.
fn smaller_side(n: usize, side: Vec<Vertex>) -> Vec<Vertex> {
    let mut set = if side.len() * 2 > n {
        let mut inside = vec![false; n];
        for &v in &side {
            inside[v] = true;
        }
        (0..n).filter(|&v| !inside[v]).collect()
    } else {
        side
    };
    set.sort_unstable();
    set
}

/// Vertices within `radius` hops of `center`. A ball that swallows the whole
/// graph is cut down to its first ⌊n/2⌋ vertices in BFS order.
fn bfs_ball(g: &Graph, center: Vertex, radius: usize) -> Vec<Vertex> {
    let n = g.n();
    let mut dist = vec![usize::MAX; n];
    let mut order = vec![center];
    dist[center] = 0;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        if dist[u] == radius {
            continue;
        }
        for &(w, _) in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                order.push(w);
            }
        }
    }
    if order.len() == n {
        order.truncate(n / 2);
    }
    smaller_side(n, order)
}

/// Cut sizes of `g` and `derived` on sampled cuts, with their ratio.
pub fn sampled_cut_ratios(g: &Graph, derived: Derived<'_>, samples: usize, seed: Seed) -> Result<Vec<CutRatioSample>> {
    if derived.n() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "vertex counts differ: {} vs {}",
            g.n(),
            derived.n()
        )));
    }
    let sets = sample_cut_sets(g, samples, seed)?;
    Ok(evaluate_cuts(g, derived, sets))
}

pub fn evaluate_cuts(g: &Graph, derived: Derived<'_>, sets: Vec<(CutFamily, Vec<Vertex>)>) -> Vec<CutRatioSample> {
    let n = g.n();
    sets.into_iter()
        .map(|(family, set)| {
            let mut mask = vec![false; n];
            for &v in &set {
                mask[v] = true;
            }
            let base_cut = g.cut_size(&set, &mask);
            let derived_cut = derived.cut(&set, &mask);
            CutRatioSample {
                family,
                set,
                base_cut,
                derived_cut,
                ratio: derived_cut / base_cut as f64,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsifierQuality {
    /// min over sampled A of w(δ_{H'}(A)) / |δ_H(A)|.
    pub c_low: f64,
    /// max over sampled A of w(δ_{H'}(A)) / (|δ_H(A)| · ln n).
    pub c_high: f64,
    pub cuts: usize,
}

pub fn sparsifier_quality(h: &Graph, sparse: &WeightedGraph, samples: usize, seed: Seed) -> Result<SparsifierQuality> {
    let rows = sampled_cut_ratios(h, Derived::Weighted(sparse), samples, seed)?;
    Ok(quality_from_ratios(h.n(), &rows))
}

pub fn quality_from_ratios(n: usize, rows: &[CutRatioSample]) -> SparsifierQuality {
    let ln_n = (n as f64).ln();
    let c_low = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let c_high = rows.iter().map(|r| r.ratio / ln_n).fold(f64::NEG_INFINITY, f64::max);
    SparsifierQuality {
        c_low,
        c_high,
        cuts: rows.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, path_graph, petersen_graph, random_regular_graph, star_graph};
    use crate::splicer::splice;

    /// Plain enumeration over every subset with 1 <= |A| <= n/2.
    fn brute(g: &Graph, kind: ExpansionKind) -> (usize, usize) {
        let n = g.n();
        let mut best = (usize::MAX, 1usize);
        for mask in 1u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            if set.len() > n / 2 {
                continue;
            }
            let num = expansion_numerator(g, kind, &set);
            if num * best.1 < best.0 * set.len() {
                best = (num, set.len());
            }
        }
        best
    }

    fn same_ratio(r: &ExpansionReport, (n, d): (usize, usize)) -> bool {
        r.numerator * d == n * r.denominator
    }

    #[test]
    fn edge_expansion_examples() {
        let r = edge_expansion_exact(&complete_graph(4).unwrap()).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.witness.len(), 2);
        let r = edge_expansion_exact(&cycle_graph(6).unwrap()).unwrap();
        assert_eq!((r.numerator, r.denominator), (2, 3));
        let r = edge_expansion_exact(&star_graph(4).unwrap()).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn vertex_expansion_examples() {
        assert_eq!(vertex_expansion_exact(&complete_graph(4).unwrap()).unwrap().value, 1.0);
        let r = vertex_expansion_exact(&path_graph(4).unwrap()).unwrap();
        assert_eq!((r.numerator, r.denominator), (1, 2));
        let r = vertex_expansion_exact(&cycle_graph(6).unwrap()).unwrap();
        assert_eq!((r.numerator, r.denominator), (2, 3));
    }

    #[test]
    fn matches_brute_force_and_witness_reproduces() {
        let mut graphs = vec![petersen_graph(), cycle_graph(9).unwrap(), star_graph(6).unwrap()];
        for s in 0..6 {
            graphs.push(random_regular_graph(12, 3, Seed(s)).unwrap());
            graphs.push(splice(&complete_graph(11).unwrap(), 2, Seed(s)).unwrap().support().clone());
        }
        for g in &graphs {
            for kind in [ExpansionKind::Edge, ExpansionKind::Vertex] {
                let r = expansion_exact(g, kind).unwrap();
                assert!(same_ratio(&r, brute(g, kind)), "{kind:?} {r:?}");
                assert!(!r.witness.is_empty() && r.witness.len() <= g.n() / 2);
                assert_eq!(expansion_numerator(g, kind, &r.witness), r.numerator);
                assert_eq!(r.witness.len(), r.denominator);
            }
        }
    }

    #[test]
    fn exact_rejects_large_and_disconnected() {
        assert!(matches!(
            edge_expansion_exact(&cycle_graph(25).unwrap()),
            Err(Error::TooLarge { .. })
        ));
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(edge_expansion_exact(&g), Err(Error::NotConnected));
    }

    #[test]
    fn identity_ratios_are_one() {
        let g = random_regular_graph(40, 3, Seed(1)).unwrap();
        let rows = sampled_cut_ratios(&g, Derived::Graph(&g), 300, Seed(2)).unwrap();
        assert_eq!(rows.len(), 300);
        assert!(rows.iter().all(|r| r.ratio == 1.0));
        for fam in [CutFamily::SizeClass, CutFamily::MinDegree, CutFamily::TreeInduced, CutFamily::BfsBall] {
            assert!(rows.iter().any(|r| r.family == fam), "{fam:?}");
        }
        for r in &rows {
            assert!(!r.set.is_empty() && r.set.len() <= 20);
            assert!(r.base_cut >= 1);
        }
    }

    #[test]
    fn splicer_ratios_at_most_one() {
        let g = complete_graph(30).unwrap();
        let s = splice(&g, 2, Seed(4)).unwrap();
        let rows = sampled_cut_ratios(&g, Derived::Splicer(&s), 200, Seed(5)).unwrap();
        assert!(rows.iter().all(|r| r.ratio <= 1.0 && r.derived_cut >= 1.0));
    }

    #[test]
    fn unit_weight_quality() {
        let g = complete_graph(20).unwrap();
        let w = WeightedGraph::uniform(g.clone(), 1.0).unwrap();
        let q = sparsifier_quality(&g, &w, 100, Seed(0)).unwrap();
        assert_eq!(q.c_low, 1.0);
        assert!((q.c_high - 1.0 / 20f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn size_classes_cover_half() {
        assert_eq!(size_classes(256), vec![1, 2, 4, 8, 16, 32, 64, 128]);
        assert_eq!(size_classes(1000), vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 500]);
        assert_eq!(size_classes(3), vec![1]);
    }

    #[test]
    fn ball_on_complete_graph_is_truncated() {
        let g = complete_graph(10).unwrap();
        let b = bfs_ball(&g, 3, 1);
        assert_eq!(b.len(), 5);
        assert!(b.contains(&3));
    }
}
