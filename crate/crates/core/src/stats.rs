//! Statistical checks on spanning-tree distributions: exact enumeration for
//! small graphs, Monte Carlo banks of sampled trees, negative correlation,
//! lower-tail bounds, and the distance between Process B_p trees and uniform
//! trees of the complete graph.
//!
//! Every Monte Carlo quantity carries its standard error; assertions compare
//! against estimate ± [`SE_MARGIN`] standard errors.

use std::collections::HashMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::graph::{complete_graph, gnp_graph, EdgeId, Graph, Vertex};
use crate::rng::{map_trials, Seed};
use crate::sampler::{aldous_broder_tree, process_bp_with_rule, TraversedRule};
use crate::tree::SpanningTree;

pub const SE_MARGIN: f64 = 4.0;

/// Largest edge count for exhaustive tree enumeration.
pub const ENUMERATION_LIMIT: usize = 20;

/// Largest n for direct total-variation estimates over all n^(n-2) trees.
pub const DIRECT_TV_LIMIT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub trials: usize,
}

impl Estimate {
    pub fn proportion(count: usize, trials: usize) -> Self {
        let p = count as f64 / trials as f64;
        Estimate {
            value: p,
            se: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    pub fn mean(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            se: (var / n).sqrt(),
            trials: samples.len(),
        }
    }

    /// `value - SE_MARGIN·se`.
    pub fn lower(&self) -> f64 {
        self.value - SE_MARGIN * self.se
    }

    pub fn upper(&self) -> f64 {
        self.value + SE_MARGIN * self.se
    }
}

/// Every spanning tree of a small graph, as edge-id bitmasks.
#[derive(Clone, Debug)]
pub struct TreeSpace {
    m: usize,
    masks: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl TreeSpace {
    pub fn new(g: &Graph) -> Result<Self> {
        let m = g.m();
        if m > ENUMERATION_LIMIT {
            return Err(Error::TooLarge {
                what: "tree enumeration (edges)",
                limit: ENUMERATION_LIMIT,
                got: m,
                hint: "use Monte Carlo estimates instead",
            });
        }
        let n = g.n();
        let mut masks = Vec::new();
        if n >= 1 && m + 1 >= n {
            let k = n - 1;
            let mut combo: Vec<usize> = (0..k).collect();
            loop {
                if is_spanning_tree(g, &combo) {
                    masks.push(combo.iter().fold(0u32, |acc, &e| acc | (1 << e)));
                }
                // next k-combination of 0..m in lexicographic order
                let Some(i) = (0..k).rev().find(|&i| combo[i] != i + m - k) else {
                    break;
                };
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                if k == 0 {
                    break;
                }
            }
        }
        let index = masks.iter().enumerate().map(|(i, &mk)| (mk, i)).collect();
        Ok(TreeSpace { m, masks, index })
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    /// Position of `tree` in the enumeration.
    pub fn index_of(&self, g: &Graph, tree: &SpanningTree) -> Result<usize> {
        let mask = tree.base_edge_ids(g)?.iter().fold(0u32, |acc, &e| acc | (1 << e));
        self.index
            .get(&mask)
            .copied()
            .ok_or_else(|| Error::InvalidParameter("tree is not a spanning tree of this graph".into()))
    }

    /// Exact count of trees containing every edge in `edges` (as
    /// `(count, total)`).
    pub fn count_containing(&self, edges: &[EdgeId]) -> (usize, usize) {
        let want = edges.iter().fold(0u32, |acc, &e| acc | (1 << e));
        let c = self.masks.iter().filter(|&&t| t & want == want).count();
        (c, self.masks.len())
    }

    /// Exact count of trees avoiding every edge in `edges`.
    pub fn count_avoiding(&self, edges: &[EdgeId]) -> (usize, usize) {
        let want = edges.iter().fold(0u32, |acc, &e| acc | (1 << e));
        let c = self.masks.iter().filter(|&&t| t & want == 0).count();
        (c, self.masks.len())
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }
}

fn is_spanning_tree(g: &Graph, edge_ids: &[EdgeId]) -> bool {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &e in edge_ids {
        let (u, v) = g.edge(e);
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// All spanning trees of a graph with at most [`ENUMERATION_LIMIT`] edges,
/// each rooted at vertex 0.
pub fn enumerate_trees(g: &Graph) -> Result<Vec<SpanningTree>> {
    let space = TreeSpace::new(g)?;
    space
        .masks()
        .iter()
        .map(|&mask| {
            let edges: Vec<(Vertex, Vertex)> = (0..g.m()).filter(|e| mask & (1 << e) != 0).map(|e| g.edge(e)).collect();
            SpanningTree::from_edges(g.n(), 0, &edges)
        })
        .collect()
}

/// Edge-membership bitsets of independently sampled uniform spanning trees.
#[derive(Clone, Debug)]
pub struct InclusionSamples {
    m: usize,
    words: usize,
    bits: Vec<u64>,
    trials: usize,
}

impl InclusionSamples {
    /// Samples `trials` Aldous-Broder trees; tree `i` uses substream
    /// `stats.inclusion/i`.
    pub fn sample(g: &Graph, trials: usize, seed: Seed) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        let m = g.m();
        let words = m.div_ceil(64).max(1);
        let rows = map_trials(trials, |i| -> Result<Vec<u64>> {
            let t = aldous_broder_tree(g, seed.derive("stats.inclusion", i as u64), None)?;
            let mut row = vec![0u64; words];
            for e in t.base_edge_ids(g)? {
                row[e / 64] |= 1 << (e % 64);
            }
            Ok(row)
        });
        let mut bits = Vec::with_capacity(trials * words);
        for r in rows {
            bits.extend(r?);
        }
        Ok(InclusionSamples { m, words, bits, trials })
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    #[inline]
    fn has(&self, trial: usize, e: EdgeId) -> bool {
        self.bits[trial * self.words + e / 64] >> (e % 64) & 1 == 1
    }

    /// Number of sampled trees containing edge `e`.
    pub fn count(&self, e: EdgeId) -> usize {
        (0..self.trials).filter(|&t| self.has(t, e)).count()
    }

    pub fn marginals(&self) -> Vec<Estimate> {
        let mut counts = vec![0usize; self.m];
        for t in 0..self.trials {
            let row = &self.bits[t * self.words..(t + 1) * self.words];
            for (w, &word) in row.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    counts[w * 64 + bits.trailing_zeros() as usize] += 1;
                    bits &= bits - 1;
                }
            }
        }
        counts.into_iter().map(|c| Estimate::proportion(c, self.trials)).collect()
    }

    /// Per-trial number of tree edges among `edges`.
    pub fn counts_in(&self, edges: &[EdgeId]) -> Vec<usize> {
        (0..self.trials)
            .map(|t| edges.iter().filter(|&&e| self.has(t, e)).count())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactCorrelation {
    /// Tree counts (containing all / avoiding all / per-edge containing), out of `total`.
    pub joint: usize,
    pub joint_absent: usize,
    pub marginals: Vec<usize>,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub edges: Vec<(Vertex, Vertex)>,
    /// Pr[all edges in T].
    pub joint: f64,
    /// Π Pr[e in T].
    pub product: f64,
    /// Pr[no edge in T].
    pub joint_absent: f64,
    /// Π Pr[e not in T].
    pub product_absent: f64,
    pub exact: Option<ExactCorrelation>,
    /// Allowance added to the products (0 for exact reports).
    pub margin: f64,
    pub margin_absent: f64,
    pub trials: usize,
    pub holds: bool,
    pub holds_absent: bool,
}

fn edge_ids(g: &Graph, edges: &[(Vertex, Vertex)]) -> Result<Vec<EdgeId>> {
    if edges.is_empty() || edges.len() > 4 {
        return Err(Error::InvalidParameter(format!(
            "edge set must have 1..=4 edges, got {}",
            edges.len()
        )));
    }
    edges
        .iter()
        .map(|&(u, v)| g.edge_id(u, v).ok_or(Error::MissingEdge(u, v)))
        .collect()
}

/// Exact check of both correlation inequalities over all spanning trees.
pub fn negative_correlation_exact(g: &Graph, space: &TreeSpace, edges: &[(Vertex, Vertex)]) -> Result<CorrelationReport> {
    let ids = edge_ids(g, edges)?;
    let total = space.len();
    let (joint, _) = space.count_containing(&ids);
    let (joint_absent, _) = space.count_avoiding(&ids);
    let marginals: Vec<usize> = ids.iter().map(|&e| space.count_containing(&[e]).0).collect();
    // joint/total <= Π m_i/total  <=>  joint · total^(k-1) <= Π m_i, in integers.
    let k = ids.len() as u32;
    let t = total as u128;
    let lhs = joint as u128 * t.pow(k - 1);
    let rhs: u128 = marginals.iter().map(|&c| c as u128).product();
    let lhs_absent = joint_absent as u128 * t.pow(k - 1);
    let rhs_absent: u128 = marginals.iter().map(|&c| (total - c) as u128).product();
    let tf = total as f64;
    Ok(CorrelationReport {
        edges: edges.to_vec(),
        joint: joint as f64 / tf,
        product: marginals.iter().map(|&c| c as f64 / tf).product(),
        joint_absent: joint_absent as f64 / tf,
        product_absent: marginals.iter().map(|&c| (total - c) as f64 / tf).product(),
        exact: Some(ExactCorrelation {
            joint,
            joint_absent,
            marginals,
            total,
        }),
        margin: 0.0,
        margin_absent: 0.0,
        trials: 0,
        holds: lhs <= rhs,
        holds_absent: lhs_absent <= rhs_absent,
    })
}

/// Monte Carlo check of both inequalities on a bank of sampled trees. The
/// allowance is SE_MARGIN times a delta-method bound on the standard error
/// of `joint - product`.
pub fn negative_correlation_sampled(g: &Graph, bank: &InclusionSamples, edges: &[(Vertex, Vertex)]) -> Result<CorrelationReport> {
    let ids = edge_ids(g, edges)?;
    let n = bank.trials();
    let counts = bank.counts_in(&ids);
    let k = ids.len();
    let joint = Estimate::proportion(counts.iter().filter(|&&c| c == k).count(), n);
    let joint_absent = Estimate::proportion(counts.iter().filter(|&&c| c == 0).count(), n);
    let marg: Vec<Estimate> = ids.iter().map(|&e| Estimate::proportion(bank.count(e), n)).collect();
    let comp: Vec<f64> = marg.iter().map(|m| 1.0 - m.value).collect();
    let product: f64 = marg.iter().map(|m| m.value).product();
    let product_absent: f64 = comp.iter().product();
    let spread = |vals: &[f64], ses: &[f64]| -> f64 {
        (0..vals.len())
            .map(|i| {
                let others: f64 = (0..vals.len()).filter(|&j| j != i).map(|j| vals[j]).product();
                others * ses[i]
            })
            .sum()
    };
    let ses: Vec<f64> = marg.iter().map(|m| m.se).collect();
    let vals: Vec<f64> = marg.iter().map(|m| m.value).collect();
    let margin = SE_MARGIN * (joint.se + spread(&vals, &ses));
    let margin_absent = SE_MARGIN * (joint_absent.se + spread(&comp, &ses));
    Ok(CorrelationReport {
        edges: edges.to_vec(),
        joint: joint.value,
        product,
        joint_absent: joint_absent.value,
        product_absent,
        exact: None,
        margin,
        margin_absent,
        trials: n,
        holds: joint.value <= product + margin,
        holds_absent: joint_absent.value <= product_absent + margin_absent,
    })
}

/// Negative correlation of `edges` in a uniform spanning tree: exact when
/// the graph is small enough to enumerate, Monte Carlo otherwise.
pub fn negative_correlation_check(g: &Graph, edges: &[(Vertex, Vertex)], trials: usize, seed: Seed) -> Result<CorrelationReport> {
    edge_ids(g, edges)?;
    if g.m() <= ENUMERATION_LIMIT {
        let space = TreeSpace::new(g)?;
        return negative_correlation_exact(g, &space, edges);
    }
    let bank = InclusionSamples::sample(g, trials, seed)?;
    negative_correlation_sampled(g, &bank, edges)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailPoint {
    /// λ as a multiple of √(p̄·|δ|).
    pub multiplier: f64,
    pub lambda: f64,
    /// p̄·|δ| − λ.
    pub threshold: f64,
    /// Empirical Pr[Σ X_e < threshold].
    pub tail: Estimate,
    /// exp(−λ² / (2 p̄ |δ|)).
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailCheckReport {
    pub set: Vec<Vertex>,
    pub cut_size: usize,
    /// Mean inclusion probability over the cut edges.
    pub p_bar: Estimate,
    pub points: Vec<TailPoint>,
    pub trials: usize,
    pub pass: bool,
}

/// λ grid as multiples of √(p̄·|δ|).
pub const TAIL_GRID: [f64; 4] = [0.25, 0.5, 1.0, 1.5];

/// Lower-tail check for the number of tree edges crossing the cut `set`
/// against the Chernoff bound for negatively correlated indicators.
pub fn chernoff_tail_from_samples(g: &Graph, bank: &InclusionSamples, set: &[Vertex]) -> Result<TailCheckReport> {
    let cut = g.cut_edges(set)?;
    let trials = bank.trials();
    let counts = bank.counts_in(&cut);
    let size = cut.len() as f64;
    let samples: Vec<f64> = counts.iter().map(|&c| c as f64 / size).collect();
    let p_bar = Estimate::mean(&samples);
    let mu = p_bar.value * size;
    let points: Vec<TailPoint> = TAIL_GRID
        .iter()
        .map(|&mult| {
            let lambda = mult * mu.sqrt();
            let threshold = mu - lambda;
            let below = counts.iter().filter(|&&c| (c as f64) < threshold).count();
            let tail = Estimate::proportion(below, trials);
            let bound = (-lambda * lambda / (2.0 * mu)).exp();
            TailPoint {
                multiplier: mult,
                lambda,
                threshold,
                pass: tail.value <= bound + SE_MARGIN * tail.se,
                tail,
                bound,
            }
        })
        .collect();
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(TailCheckReport {
        set: sorted,
        cut_size: cut.len(),
        p_bar,
        pass: points.iter().all(|p| p.pass),
        points,
        trials,
    })
}

pub fn chernoff_tail_check(g: &Graph, set: &[Vertex], trials: usize, seed: Seed) -> Result<TailCheckReport> {
    g.subset_mask(set)?;
    let bank = InclusionSamples::sample(g, trials, seed)?;
    chernoff_tail_from_samples(g, &bank, set)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinEdgeReport {
    pub edge: (Vertex, Vertex),
    pub estimate: Estimate,
}

/// Edge with the smallest empirical inclusion frequency.
pub fn min_tree_edge_probability(g: &Graph, trials: usize, seed: Seed) -> Result<MinEdgeReport> {
    if g.m() == 0 {
        return Err(Error::InvalidParameter("graph has no edges".into()));
    }
    let bank = InclusionSamples::sample(g, trials, seed)?;
    Ok(min_edge_from_samples(g, &bank))
}

pub fn min_edge_from_samples(g: &Graph, bank: &InclusionSamples) -> MinEdgeReport {
    let marg = bank.marginals();
    let (e, est) = marg
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .expect("nonempty edge set");
    MinEdgeReport {
        edge: g.edge(e),
        estimate: *est,
    }
}

/// Total variation distance between two count vectors over the same outcome
/// space (each normalized by its own total).
pub fn total_variation(a: &[u64], b: &[u64]) -> f64 {
    let ta = a.iter().sum::<u64>() as f64;
    let tb = b.iter().sum::<u64>() as f64;
    0.5 * a.iter().zip(b).map(|(&x, &y)| (x as f64 / ta - y as f64 / tb).abs()).sum::<f64>()
}

/// Total variation distance of observed counts from the uniform distribution.
pub fn total_variation_from_uniform(counts: &[u64]) -> f64 {
    let t = counts.iter().sum::<u64>() as f64;
    let u = 1.0 / counts.len() as f64;
    0.5 * counts.iter().map(|&c| (c as f64 / t - u).abs()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit against the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let t = counts.iter().sum::<u64>() as f64;
    let expected = t / counts.len() as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>();
    let dof = counts.len() - 1;
    let p_value = ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN);
    ChiSquare { statistic, dof, p_value }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingReport {
    pub n: usize,
    pub p: f64,
    pub rule: TraversedRule,
    /// Empirical failure rate of Process B_p on fresh G(n,p) instances; an
    /// upper bound on the distance to uniform trees of K_n.
    pub failure: Estimate,
    /// For n <= 8: TV between the Process B_p outcome distribution (failures
    /// as an extra outcome) and the exact uniform distribution on trees of K_n.
    pub tv_to_uniform: Option<f64>,
    /// For n <= 8: TV between Process B_p outcomes and Aldous-Broder samples
    /// on K_n drawn in the same number of trials.
    pub tv_two_sample: Option<f64>,
    pub trials: usize,
}

pub fn coupling_distance_estimate(n: usize, p: f64, trials: usize, seed: Seed) -> Result<CouplingReport> {
    coupling_distance_with_rule(n, p, trials, seed, TraversedRule::PerArc)
}

pub fn coupling_distance_with_rule(n: usize, p: f64, trials: usize, seed: Seed, rule: TraversedRule) -> Result<CouplingReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (0, 1]")));
    }
    if n < 2 || trials == 0 {
        return Err(Error::InvalidParameter("need n >= 2 and trials >= 1".into()));
    }
    let direct = n <= DIRECT_TV_LIMIT;
    let outcomes = map_trials(trials, |i| -> Result<(Option<u64>, Option<u64>)> {
        let h = gnp_graph(n, p, seed.derive("stats.coupling.graph", i as u64))?;
        let r = process_bp_with_rule(&h, p, seed.derive("stats.coupling.walk", i as u64), 0, rule)?;
        let bp = r.tree().map(|t| if direct { t.prufer_index() } else { 0 });
        Ok((bp, None))
    });
    let mut failures = 0usize;
    let space = if direct { (n as u64).pow(n as u32 - 2) as usize } else { 0 };
    let mut bp_counts = vec![0u64; space + 1];
    for o in outcomes {
        match o?.0 {
            Some(idx) => {
                if direct {
                    bp_counts[idx as usize] += 1;
                }
            }
            None => failures += 1,
        }
    }
    let (tv_to_uniform, tv_two_sample) = if direct {
        bp_counts[space] = failures as u64;
        let t = trials as f64;
        let u = 1.0 / space as f64;
        let tv_u = 0.5
            * (bp_counts[..space].iter().map(|&c| (c as f64 / t - u).abs()).sum::<f64>()
                + failures as f64 / t);
        let kn = complete_graph(n)?;
        let refs = map_trials(trials, |i| {
            aldous_broder_tree(&kn, seed.derive("stats.coupling.reference", i as u64), None).map(|t| t.prufer_index())
        });
        let mut ref_counts = vec![0u64; space + 1];
        for r in refs {
            ref_counts[r? as usize] += 1;
        }
        (Some(tv_u), Some(total_variation(&bp_counts, &ref_counts)))
    } else {
        (None, None)
    };
    Ok(CouplingReport {
        n,
        p,
        rule,
        failure: Estimate::proportion(failures, trials),
        tv_to_uniform,
        tv_two_sample,
        trials,
    })
}
