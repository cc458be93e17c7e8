use super::{ordered, Graph, Vertex};
use crate::error::{Error, Result};
use crate::rng::Seed;

/// Pairing attempts before `random_regular_graph` gives up.
pub const REGULAR_RETRY_CAP: usize = 100_000;

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("complete graph needs n >= 2, got {n}")));
    }
    let edges = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Ok(Graph::from_checked(n, edges))
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("cycle needs n >= 3, got {n}")));
    }
    let edges = (0..n).map(|i| ordered(i, (i + 1) % n)).collect();
    Ok(Graph::from_checked(n, edges))
}

pub fn path_graph(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidSize("path needs n >= 1".into()));
    }
    Ok(Graph::from_checked(n, (1..n).map(|i| (i - 1, i)).collect()))
}

/// Star K_{1,leaves} with center 0.
pub fn star_graph(leaves: usize) -> Result<Graph> {
    if leaves < 1 {
        return Err(Error::InvalidSize("star needs at least one leaf".into()));
    }
    Ok(Graph::from_checked(leaves + 1, (1..=leaves).map(|i| (0, i)).collect()))
}

/// Outer 5-cycle 0..5, inner pentagram 5..10, spokes i -- i+5.
pub fn petersen_graph() -> Graph {
    let mut edges = Vec::with_capacity(15);
    for i in 0..5 {
        edges.push(ordered(i, (i + 1) % 5));
        edges.push(ordered(5 + i, 5 + (i + 2) % 5));
        edges.push((i, i + 5));
    }
    Graph::from_checked(10, edges)
}

/// G(n, p): each of the n(n-1)/2 pairs independently with probability `p`,
/// pairs visited in lexicographic order.
pub fn gnp_graph(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    if n < 1 {
        return Err(Error::InvalidSize("G(n,p) needs n >= 1".into()));
    }
    let mut rng = seed.stream("graph.gnp", 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.bernoulli(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_checked(n, edges))
}

/// Uniform d-regular simple graph by the configuration model: shuffle the
/// n·d half-edges, pair them consecutively, and start over whenever the
/// pairing has a loop or a repeated pair.
pub fn random_regular_graph(n: usize, d: usize, seed: Seed) -> Result<Graph> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidSize("random regular graph needs n, d >= 1".into()));
    }
    if d >= n {
        return Err(Error::InvalidParameter(format!("degree {d} must be below n = {n}")));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::InvalidParameter(format!("n·d = {} is odd", n * d)));
    }
    let mut rng = seed.stream("graph.random_regular", 0);
    let mut points: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
    'attempt: for _ in 0..REGULAR_RETRY_CAP {
        rng.shuffle(&mut points);
        seen.clear();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert(ordered(u, v)) {
                continue 'attempt;
            }
            edges.push(ordered(u, v));
        }
        return Ok(Graph::from_checked(n, edges));
    }
    Err(Error::SamplingFailure {
        what: format!("simple {d}-regular pairing on {n} vertices"),
        attempts: REGULAR_RETRY_CAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_sizes() {
        assert_eq!(complete_graph(2).unwrap().m(), 1);
        let k4 = complete_graph(4).unwrap();
        assert_eq!(k4.m(), 6);
        assert!((0..4).all(|v| k4.degree(v) == 3));
        assert_eq!(complete_graph(100).unwrap().m(), 4950);
        assert!(matches!(complete_graph(1), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn gnp_extremes() {
        assert_eq!(gnp_graph(50, 0.0, Seed(1)).unwrap().m(), 0);
        assert_eq!(gnp_graph(50, 1.0, Seed(1)).unwrap(), complete_graph(50).unwrap());
        assert!(gnp_graph(50, 1.5, Seed(1)).is_err());
        assert!(gnp_graph(50, -0.1, Seed(1)).is_err());
    }

    #[test]
    fn gnp_is_seed_deterministic() {
        let a = gnp_graph(200, 0.05, Seed(9)).unwrap();
        let b = gnp_graph(200, 0.05, Seed(9)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gnp_graph(200, 0.05, Seed(10)).unwrap());
    }

    #[test]
    fn regular_small_cases() {
        let g = random_regular_graph(4, 3, Seed(3)).unwrap();
        assert_eq!(g.m(), 6);
        let g = random_regular_graph(6, 2, Seed(3)).unwrap();
        assert!((0..6).all(|v| g.degree(v) == 2));
        assert!(random_regular_graph(5, 3, Seed(3)).is_err());
        assert!(random_regular_graph(4, 4, Seed(3)).is_err());
    }

    #[test]
    fn petersen_shape() {
        let g = petersen_graph();
        assert_eq!((g.n(), g.m()), (10, 15));
        assert!((0..10).all(|v| g.degree(v) == 3));
    }
}
