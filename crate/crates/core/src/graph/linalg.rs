//! Exact and floating-point Laplacian oracles: matrix-tree counts and
//! effective resistances with unit resistors.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{Graph, Vertex};
use crate::error::{Error, Result};

/// Up to this many vertices resistances are computed in exact rationals.
pub const EXACT_RESISTANCE_LIMIT: usize = 64;

pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
    }
    l
}

/// Integer Laplacian with the last row and column removed.
fn reduced_laplacian_int(g: &Graph) -> Vec<Vec<BigInt>> {
    let k = g.n() - 1;
    let mut m = vec![vec![BigInt::zero(); k]; k];
    for v in 0..k {
        m[v][v] = BigInt::from(g.degree(v));
    }
    for &(u, v) in g.edges() {
        if u < k && v < k {
            m[u][v] -= 1;
            m[v][u] -= 1;
        }
    }
    m
}

/// Number of spanning trees (Kirchhoff), as the determinant of a Laplacian
/// cofactor by fraction-free Bareiss elimination. Disconnected graphs give 0.
pub fn spanning_tree_count(g: &Graph) -> BigInt {
    if g.n() == 0 {
        return BigInt::zero();
    }
    if g.n() == 1 {
        return BigInt::one();
    }
    if !g.is_connected() {
        return BigInt::zero();
    }
    bareiss_determinant(reduced_laplacian_int(g))
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let k = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for i in 0..k {
        if a[i][i].is_zero() {
            match (i + 1..k).find(|&r| !a[r][i].is_zero()) {
                Some(r) => {
                    a.swap(i, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for r in i + 1..k {
            for c in i + 1..k {
                let num = &a[r][c] * &a[i][i] - &a[r][i] * &a[i][c];
                a[r][c] = num / &prev;
            }
            a[r][i] = BigInt::zero();
        }
        prev = a[i][i].clone();
    }
    sign * prev
}

enum Inverse {
    Exact(Vec<Vec<BigRational>>),
    Float {
        matrix: DMatrix<f64>,
        chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    },
}

/// Answers resistance queries on one connected graph. The Laplacian is
/// grounded at the last vertex; the grounded matrix is inverted exactly for
/// small graphs and Cholesky-factored otherwise.
pub struct ResistanceOracle {
    n: usize,
    inverse: Inverse,
}

impl ResistanceOracle {
    pub fn new(g: &Graph) -> Result<Self> {
        if g.n() < 2 || !g.is_connected() {
            return Err(Error::NotConnected);
        }
        let inverse = if g.n() <= EXACT_RESISTANCE_LIMIT {
            Inverse::Exact(exact_inverse(reduced_laplacian_int(g)))
        } else {
            let k = g.n() - 1;
            let full = laplacian(g);
            let matrix = full.view((0, 0), (k, k)).into_owned();
            let chol = matrix.clone().cholesky().ok_or(Error::NotConnected)?;
            Inverse::Float { matrix, chol }
        };
        Ok(ResistanceOracle { n: g.n(), inverse })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.inverse, Inverse::Exact(_))
    }

    /// Exact resistance between `u` and `v`, when the oracle is exact.
    pub fn exact(&self, u: Vertex, v: Vertex) -> Option<BigRational> {
        let Inverse::Exact(m) = &self.inverse else {
            return None;
        };
        let ground = self.n - 1;
        let entry = |a: Vertex, b: Vertex| {
            if a == ground || b == ground {
                BigRational::zero()
            } else {
                m[a][b].clone()
            }
        };
        Some(entry(u, u) + entry(v, v) - entry(u, v) - entry(v, u))
    }

    pub fn resistance(&self, u: Vertex, v: Vertex) -> f64 {
        assert!(u < self.n && v < self.n, "vertex out of range");
        if u == v {
            return 0.0;
        }
        match &self.inverse {
            Inverse::Exact(_) => self
                .exact(u, v)
                .and_then(|r| r.to_f64())
                .expect("exact resistance is finite"),
            Inverse::Float { matrix, chol } => {
                let ground = self.n - 1;
                let mut b = DVector::zeros(self.n - 1);
                if u != ground {
                    b[u] = 1.0;
                }
                if v != ground {
                    b[v] = -1.0;
                }
                let x = solve_refined(matrix, chol, &b);
                let pot = |w: Vertex| if w == ground { 0.0 } else { x[w] };
                pot(u) - pot(v)
            }
        }
    }
}

/// Cholesky solve followed by a few rounds of iterative refinement.
fn solve_refined(
    a: &DMatrix<f64>,
    chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
    b: &DVector<f64>,
) -> DVector<f64> {
    let mut x = chol.solve(b);
    for _ in 0..3 {
        let r = b - a * &x;
        if r.amax() <= f64::EPSILON * b.amax() {
            break;
        }
        x += chol.solve(&r);
    }
    x
}

fn exact_inverse(a: Vec<Vec<BigInt>>) -> Vec<Vec<BigRational>> {
    let k = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.into_iter().map(BigRational::from_integer).collect();
            r.extend((0..k).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !m[r][col].is_zero())
            .expect("grounded Laplacian of a connected graph is nonsingular");
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for c in col..2 * k {
            m[col][c] = &m[col][c] * &inv;
        }
        for r in 0..k {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..2 * k {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    m.into_iter().map(|row| row[k..].to_vec()).collect()
}

/// Effective resistance across edge `{u, v}` with every edge a unit resistor.
pub fn effective_resistance(g: &Graph, u: Vertex, v: Vertex) -> Result<f64> {
    if !g.has_edge(u, v) {
        return Err(Error::MissingEdge(u, v));
    }
    let oracle = ResistanceOracle::new(g)?;
    Ok(oracle.resistance(u, v))
}
