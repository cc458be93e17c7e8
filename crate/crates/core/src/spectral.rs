//! Algebraic connectivity λ₂ of the combinatorial Laplacian by Lanczos
//! iteration restricted to the complement of the constant vector.
//!
//! For every A with |A| <= n/2, |δ(A)| >= λ₂ · |A| · (n - |A|) / n >= λ₂|A|/2,
//! so λ₂/2 certifies a lower bound on edge expansion.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Seed;

/// Relative tolerance on the Ritz residual.
pub const EIGEN_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub lambda2: f64,
    /// λ₂ / 2.
    pub edge_expansion_bound: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// λ₂ of a connected graph with its Cheeger-type edge-expansion certificate.
pub fn spectral_lower_bound(g: &Graph) -> Result<SpectralReport> {
    if g.n() < 2 || !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let n = g.n();
    let max_iter = n - 1;
    let mut rng = Seed(0x5eed_1a2c).stream("cuts.spectral", n as u64);

    let laplacian_apply = |x: &[f64], y: &mut [f64]| {
        for v in 0..n {
            let mut acc = g.degree(v) as f64 * x[v];
            for &(w, _) in g.neighbors(v) {
                acc -= x[w];
            }
            y[v] = acc;
        }
    };

    let mut q: Vec<f64> = (0..n).map(|_| rng.unit() - 0.5).collect();
    project_out_constant(&mut q);
    normalize(&mut q);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let scale = 2.0 * g.max_degree() as f64;

    for j in 0..max_iter {
        laplacian_apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        // Full reorthogonalization, twice, against the basis and the constant vector.
        for _ in 0..2 {
            project_out_constant(&mut w);
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let b = norm(&w);
        let m = alpha.len();
        let check = b <= 1e-12 * scale || m == max_iter || m.is_multiple_of(5);
        if check {
            let (theta, last) = smallest_eigenpair(&alpha, &beta);
            let residual = b * last.abs();
            if b <= 1e-12 * scale || m == max_iter || residual <= EIGEN_TOLERANCE * theta.abs().max(1e-300) {
                return Ok(SpectralReport {
                    lambda2: theta,
                    edge_expansion_bound: theta / 2.0,
                    iterations: m,
                    residual,
                });
            }
        }
        beta.push(b);
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        basis.push(next);
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let s = norm(a);
    a.iter_mut().for_each(|x| *x /= s);
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

fn project_out_constant(a: &mut [f64]) {
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    a.iter_mut().for_each(|x| *x -= mean);
}

/// Smallest eigenvalue of the symmetric tridiagonal matrix (diagonal `alpha`,
/// off-diagonal `beta`) and the last component of its unit eigenvector.
fn smallest_eigenpair(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let m = alpha.len();
    if m == 1 {
        return (alpha[0], 1.0);
    }
    // Gershgorin interval.
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..m {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 } + if i + 1 < m { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    // Bisection on the Sturm count: number of eigenvalues below x.
    let below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..m {
            let off = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - off / d;
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
    }
    let theta = 0.5 * (lo + hi);

    // Inverse iteration for the eigenvector.
    let shift = theta - 1e-10 * theta.abs().max(1e-12);
    let mut x = vec![1.0 / (m as f64).sqrt(); m];
    for _ in 0..4 {
        x = solve_tridiagonal(alpha, beta, shift, &x);
        let s = norm(&x);
        if !s.is_finite() || s == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= s);
    }
    (theta, x[m - 1])
}

/// Solves (T - shift·I) x = rhs by the Thomas algorithm.
fn solve_tridiagonal(alpha: &[f64], beta: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let m = alpha.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let guard = |p: f64| if p.abs() < 1e-300 { 1e-300 } else { p };
    let mut piv = guard(alpha[0] - shift);
    c[0] = if m > 1 { beta[0] / piv } else { 0.0 };
    d[0] = rhs[0] / piv;
    for i in 1..m {
        piv = guard(alpha[i] - shift - beta[i - 1] * c[i - 1]);
        c[i] = if i + 1 < m { beta[i] / piv } else { 0.0 };
        d[i] = (rhs[i] - beta[i - 1] * d[i - 1]) / piv;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, laplacian, path_graph, petersen_graph, random_regular_graph};
    use nalgebra::SymmetricEigen;

    fn dense_lambda2(g: &Graph) -> f64 {
        let mut ev: Vec<f64> = SymmetricEigen::new(laplacian(g)).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev[1]
    }

    #[test]
    fn complete_graph_spectrum() {
        for n in [2, 5, 40] {
            let r = spectral_lower_bound(&complete_graph(n).unwrap()).unwrap();
            assert!((r.lambda2 - n as f64).abs() <= 1e-8 * n as f64, "{r:?}");
            assert!((r.edge_expansion_bound - n as f64 / 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn cycle_closed_form() {
        for n in [5, 17, 100, 301] {
            let want = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
            let r = spectral_lower_bound(&cycle_graph(n).unwrap()).unwrap();
            assert!(((r.lambda2 - want) / want).abs() <= 1e-8, "n={n} {} vs {want}", r.lambda2);
        }
    }

    #[test]
    fn agrees_with_dense_solver() {
        let mut graphs = vec![petersen_graph(), path_graph(30).unwrap()];
        for s in 0..4 {
            graphs.push(random_regular_graph(60, 3, Seed(s)).unwrap());
        }
        for g in graphs {
            let want = dense_lambda2(&g);
            let got = spectral_lower_bound(&g).unwrap().lambda2;
            assert!(((got - want) / want).abs() <= 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn disconnected_rejected() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(spectral_lower_bound(&g), Err(Error::NotConnected));
    }
}
