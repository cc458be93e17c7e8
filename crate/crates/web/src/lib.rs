//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every export takes plain numbers and strings and returns a JSON string,
//! so the page needs no generated bindings beyond the functions themselves.

use serde_json::{json, Value};
use splicer_core::cuts::vertex_expansion_exact;
use splicer_core::graph::{complete_graph, cycle_graph, gnp_graph, petersen_graph, random_regular_graph};
use splicer_core::route::{build_routing, route, SwitchPolicy};
use splicer_core::sampler::aldous_broder;
use splicer_core::spectral::spectral_lower_bound;
use splicer_core::splicer::splice;
use splicer_core::{Graph, Seed};
use wasm_bindgen::prelude::*;

/// Largest graph the page will build.
pub const MAX_VERTICES: usize = 400;
/// Exact vertex expansion is only attempted up to this size.
pub const EXACT_EXPANSION_LIMIT: usize = 20;
/// Walk positions returned for animation.
const TRACE_LIMIT: usize = 5000;

fn build_graph(kind: &str, n: usize, seed: Seed) -> Result<Graph, String> {
    if !(2..=MAX_VERTICES).contains(&n) {
        return Err(format!("n must be in 2..={MAX_VERTICES}"));
    }
    let g = match kind {
        "complete" => complete_graph(n),
        "cycle" => cycle_graph(n),
        "petersen" => Ok(petersen_graph()),
        "regular3" => random_regular_graph(n, 3, seed.derive("web.graph", 0)),
        "gnp" => {
            let p = (2.0 * (n as f64).ln() / n as f64).min(1.0);
            (0..64)
                .map(|i| gnp_graph(n, p, seed.derive("web.graph", i)))
                .find(|g| g.as_ref().map_or(true, Graph::is_connected))
                .unwrap_or(Err(splicer_core::Error::NotConnected))
        }
        other => return Err(format!("unknown graph kind {other:?}")),
    };
    g.map_err(|e| e.to_string())
}

fn edges_json(g: &Graph) -> Value {
    json!(g.edges())
}

/// One Aldous-Broder tree with the walk that produced it.
pub fn sample_tree_value(kind: &str, n: usize, seed: u64) -> Result<Value, String> {
    let seed = Seed(seed);
    let g = build_graph(kind, n, seed)?;
    let (tree, trace) = aldous_broder(&g, seed.derive("web.tree", 0), Some(0)).map_err(|e| e.to_string())?;
    let shown = trace.vertices.len().min(TRACE_LIMIT);
    Ok(json!({
        "n": g.n(),
        "edges": edges_json(&g),
        "tree": tree.canonical_edges(),
        "parent": tree.parents(),
        "steps": trace.steps,
        "walk": &trace.vertices[..shown],
        "walk_truncated": shown < trace.vertices.len(),
    }))
}

/// Union of `k` independent trees with its λ₂ and, when small, exact vertex expansion.
pub fn splice_value(kind: &str, n: usize, k: usize, seed: u64) -> Result<Value, String> {
    if !(1..=8).contains(&k) {
        return Err("k must be in 1..=8".into());
    }
    let seed = Seed(seed);
    let g = build_graph(kind, n, seed)?;
    let s = splice(&g, k, seed.derive("web.splice", 0)).map_err(|e| e.to_string())?;
    let support = s.support();
    let spectral = if support.n() >= 2 { spectral_lower_bound(support).ok() } else { None };
    let expansion = if support.n() <= EXACT_EXPANSION_LIMIT {
        vertex_expansion_exact(support).ok()
    } else {
        None
    };
    Ok(json!({
        "n": g.n(),
        "base_edges": g.m(),
        "edges": edges_json(support),
        "multiplicity": s.multiplicity(),
        "trees": s.trees().iter().map(|t| t.canonical_edges()).collect::<Vec<_>>(),
        "lambda2": spectral.map(|r| r.lambda2),
        "vertex_expansion": expansion,
    }))
}

/// Routes `src -> dst` over `k` trees of K_n after failing each support edge
/// independently with probability `failure_prob`.
pub fn route_value(n: usize, k: usize, failure_prob: f64, src: usize, dst: usize, seed: u64) -> Result<Value, String> {
    if !(1..=8).contains(&k) {
        return Err("k must be in 1..=8".into());
    }
    if !(0.0..=1.0).contains(&failure_prob) {
        return Err("failure probability must be in [0, 1]".into());
    }
    if src >= n || dst >= n {
        return Err("endpoints must be vertices of the graph".into());
    }
    let seed = Seed(seed);
    let g = build_graph("complete", n, seed)?;
    let s = splice(&g, k, seed.derive("web.route.splice", 0)).map_err(|e| e.to_string())?;
    let mut coin = seed.stream("web.route.failures", 0);
    let failed: Vec<_> = s.support().edges().iter().copied().filter(|_| coin.bernoulli(failure_prob)).collect();
    let state = build_routing(s.trees()).map_err(|e| e.to_string())?.with_failures(failed.iter().copied());
    let result = route(&state, src, dst, SwitchPolicy::RoundRobin, 4 * n, seed.derive("web.route.walk", 0))
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n,
        "edges": edges_json(s.support()),
        "trees": s.trees().iter().map(|t| t.canonical_edges()).collect::<Vec<_>>(),
        "failed": failed,
        "route": result,
    }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sample_tree(kind: &str, n: usize, seed: u64) -> Result<String, JsValue> {
    to_js(sample_tree_value(kind, n, seed))
}

#[wasm_bindgen]
pub fn splice_graph(kind: &str, n: usize, k: usize, seed: u64) -> Result<String, JsValue> {
    to_js(splice_value(kind, n, k, seed))
}

#[wasm_bindgen]
pub fn route_packet(n: usize, k: usize, failure_prob: f64, src: usize, dst: usize, seed: u64) -> Result<String, JsValue> {
    to_js(route_value(n, k, failure_prob, src, dst, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &Value) -> Vec<(usize, usize)> {
        serde_json::from_value(v.clone()).unwrap()
    }

    #[test]
    fn tree_spans_and_follows_walk() {
        let v = sample_tree_value("petersen", 10, 5).unwrap();
        let tree = pairs(&v["tree"]);
        assert_eq!(tree.len(), 9);
        let base = pairs(&v["edges"]);
        assert!(tree.iter().all(|e| base.contains(e)));
        // Each non-root vertex hangs off the vertex the walk entered it from.
        let walk: Vec<usize> = serde_json::from_value(v["walk"].clone()).unwrap();
        let parent: Vec<Option<usize>> = serde_json::from_value(v["parent"].clone()).unwrap();
        let mut seen = [false; 10];
        seen[walk[0]] = true;
        for w in walk.windows(2) {
            if !seen[w[1]] {
                seen[w[1]] = true;
                assert_eq!(parent[w[1]], Some(w[0]));
            }
        }
    }

    #[test]
    fn splice_reports_expansion_for_small_graphs() {
        let v = splice_value("complete", 12, 2, 3).unwrap();
        let mult: Vec<u32> = serde_json::from_value(v["multiplicity"].clone()).unwrap();
        assert_eq!(mult.iter().sum::<u32>(), 2 * 11);
        assert!(v["lambda2"].as_f64().unwrap() > 0.0);
        assert!(v["vertex_expansion"]["value"].as_f64().is_some());
        let big = splice_value("complete", 40, 2, 3).unwrap();
        assert!(big["vertex_expansion"].is_null());
    }

    #[test]
    fn route_without_failures_stays_on_first_tree() {
        let v = route_value(20, 3, 0.0, 4, 17, 11).unwrap();
        assert_eq!(v["route"]["delivered"], true);
        assert_eq!(v["route"]["switches"], 0);
        let path: Vec<usize> = serde_json::from_value(v["route"]["path"].clone()).unwrap();
        assert_eq!((path[0], *path.last().unwrap()), (4, 17));
        let first = pairs(&v["trees"][0]);
        for w in path.windows(2) {
            assert!(first.contains(&(w[0].min(w[1]), w[0].max(w[1]))));
        }
    }

    #[test]
    fn routes_never_use_failed_edges() {
        for seed in 0..20 {
            let v = route_value(30, 3, 0.2, 0, 29, seed).unwrap();
            let failed = pairs(&v["failed"]);
            let path: Vec<usize> = serde_json::from_value(v["route"]["path"].clone()).unwrap();
            for w in path.windows(2) {
                assert!(!failed.contains(&(w[0].min(w[1]), w[0].max(w[1]))));
            }
        }
    }

    #[test]
    fn same_seed_same_output() {
        assert_eq!(splice_value("regular3", 30, 2, 9), splice_value("regular3", 30, 2, 9));
        assert_eq!(route_value(25, 2, 0.1, 1, 2, 9), route_value(25, 2, 0.1, 1, 2, 9));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(sample_tree_value("torus", 10, 0).is_err());
        assert!(splice_value("complete", 1, 2, 0).is_err());
        assert!(route_value(10, 2, 1.5, 0, 1, 0).is_err());
        assert!(route_value(10, 2, 0.1, 0, 10, 0).is_err());
    }
}
