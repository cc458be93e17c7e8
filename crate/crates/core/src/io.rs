//! Plain-text formats.
//!
//! Graph: a header line `n m`, then one `u v` line per edge in edge-id order.
//! Weighted graph: the same with a third column holding the weight in the
//! shortest decimal form that parses back to the same `f64`.
//! Tree: a header line `tree n root`, then its edges sorted.
//! Blank lines and lines starting with `#` are skipped when reading.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{ordered, Graph, Vertex};
use crate::splicer::WeightedGraph;
use crate::tree::{SpanningTree, WalkTrace};

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> + '_ {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("bad number {tok:?}")))
}

fn header<'a>(it: &mut impl Iterator<Item = (usize, Vec<&'a str>)>) -> Result<(usize, usize, usize)> {
    let (line, toks) = it.next().ok_or_else(|| parse_err(0, "empty input"))?;
    if toks.len() != 2 {
        return Err(parse_err(line, "expected header `n m`"));
    }
    Ok((line, number(line, toks[0])?, number(line, toks[1])?))
}

/// Reads edges, checking ranges, loops and duplicates against line numbers.
fn read_edges<'a>(
    n: usize,
    m: usize,
    cols: usize,
    header_line: usize,
    it: impl Iterator<Item = (usize, Vec<&'a str>)>,
) -> Result<(Vec<(Vertex, Vertex)>, Vec<f64>)> {
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::new();
    for (line, toks) in it {
        if toks.len() != cols {
            return Err(parse_err(line, format!("expected {cols} fields, got {}", toks.len())));
        }
        let (u, v): (Vertex, Vertex) = (number(line, toks[0])?, number(line, toks[1])?);
        if u >= n || v >= n {
            return Err(parse_err(line, format!("vertex out of range for n = {n}")));
        }
        if u == v {
            return Err(parse_err(line, format!("self-loop {u} {v}")));
        }
        let e = ordered(u, v);
        if !seen.insert(e) {
            return Err(parse_err(line, format!("duplicate edge ({}, {})", e.0, e.1)));
        }
        edges.push(e);
        if cols == 3 {
            weights.push(number(line, toks[2])?);
        }
    }
    if edges.len() != m {
        return Err(parse_err(header_line, format!("header says {m} edges, found {}", edges.len())));
    }
    Ok((edges, weights))
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut it = lines(text);
    let (hl, n, m) = header(&mut it)?;
    let (edges, _) = read_edges(n, m, 2, hl, it)?;
    Graph::from_edges(n, edges)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn read_weighted(text: &str) -> Result<WeightedGraph> {
    let mut it = lines(text);
    let (hl, n, m) = header(&mut it)?;
    let (edges, weights) = read_edges(n, m, 3, hl, it)?;
    WeightedGraph::new(Graph::from_edges(n, edges)?, weights)
}

pub fn write_weighted(w: &WeightedGraph) -> String {
    let g = w.graph();
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (&(u, v), x) in g.edges().iter().zip(w.weights()) {
        let _ = writeln!(out, "{u} {v} {x:?}");
    }
    out
}

pub fn read_tree(text: &str) -> Result<SpanningTree> {
    let mut it = lines(text);
    let (line, toks) = it.next().ok_or_else(|| parse_err(0, "empty input"))?;
    if toks.len() != 3 || toks[0] != "tree" {
        return Err(parse_err(line, "expected header `tree n root`"));
    }
    let (n, root): (usize, Vertex) = (number(line, toks[1])?, number(line, toks[2])?);
    let mut edges = Vec::new();
    for (line, toks) in it {
        if toks.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, got {}", toks.len())));
        }
        let (u, v): (Vertex, Vertex) = (number(line, toks[0])?, number(line, toks[1])?);
        if u == v {
            return Err(parse_err(line, format!("self-loop {u} {v}")));
        }
        edges.push((u, v));
    }
    SpanningTree::from_edges(n, root, &edges)
}

pub fn write_tree(t: &SpanningTree) -> String {
    let mut out = format!("tree {} {}\n", t.n(), t.root());
    for (u, v) in t.canonical_edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// One vertex per line, walk order.
pub fn write_trace(trace: &WalkTrace) -> String {
    let mut out = String::with_capacity(trace.vertices.len() * 4);
    for v in &trace.vertices {
        let _ = writeln!(out, "{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_graph;

    #[test]
    fn graph_roundtrip_is_byte_identical() {
        let text = write_graph(&complete_graph(4).unwrap());
        let g = read_graph(&text).unwrap();
        assert_eq!(write_graph(&g), text);
        assert_eq!(g, complete_graph(4).unwrap());
    }

    #[test]
    fn self_loop_names_line() {
        let err = read_graph("4 2\n0 1\n3 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let dup = read_graph("3 2\n0 1\n# comment\n1 0\n").unwrap_err();
        assert_eq!(dup.to_string(), "line 4: duplicate edge (0, 1)");
        assert!(matches!(read_graph("3 2\n0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_graph("3 1\n0 x\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn weights_roundtrip_bit_exactly() {
        let g = complete_graph(3).unwrap();
        let ws = vec![0.1 + 0.2, std::f64::consts::PI * 1e-17, 123456789.12345678];
        let w = WeightedGraph::new(g, ws.clone()).unwrap();
        let text = write_weighted(&w);
        let back = read_weighted(&text).unwrap();
        for (a, b) in back.weights().iter().zip(&ws) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(write_weighted(&back), text);
        let w17 = read_weighted("2 1\n0 1 0.30000000000000004\n").unwrap();
        assert_eq!(w17.weights()[0], 0.1 + 0.2);
    }

    #[test]
    fn tree_roundtrip() {
        let t = SpanningTree::from_edges(4, 2, &[(3, 1), (0, 1), (1, 2)]).unwrap();
        let text = write_tree(&t);
        assert_eq!(text, "tree 4 2\n0 1\n1 2\n1 3\n");
        assert_eq!(write_tree(&read_tree(&text).unwrap()), text);
        assert!(read_tree("graph 4 0\n").is_err());
    }
}
