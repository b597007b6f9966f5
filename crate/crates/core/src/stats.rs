//! Reference uniform samplers and the Friedman-Rafsky two-sample test.
//!
//! The test pools both samples, builds the Euclidean minimum spanning tree
//! and counts the edges `R` joining points from different samples. Under the
//! permutation null (both samples from one distribution)
//!
//! ```text
//! E[R]   = 2 m n / N + 1
//! Var[R] = 2 m n / (N (N - 1)) * ( (2 m n - N) / N
//!          + (C - N + 2) / ((N - 2)(N - 3)) * (N (N - 1) - 4 m n + 2) )
//! ```
//!
//! with `N = m + n` and `C` the number of edge pairs sharing a node. Too few
//! cross edges (a strongly negative z-value) means the samples segregate.

use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sampler::rng::unit_uniform;

/// z-values below this reject uniformity.
pub const Z_THRESHOLD: f64 = -1.64;

/// `count` i.i.d. rows uniform on `[-1, 1]^n`.
pub fn sample_uniform_hypercube<R: RngCore + ?Sized>(rng: &mut R, n: usize, count: usize) -> Matrix {
    let data = (0..n * count).map(|_| 2.0 * unit_uniform(rng) - 1.0).collect();
    Matrix::new(count, n, data).expect("sized above")
}

/// Normalises i.i.d. standard exponentials onto the simplex.
pub fn simplex_from_exponentials(e: &[f64]) -> Vec<f64> {
    let total: f64 = e.iter().sum();
    e.iter().map(|v| v / total).collect()
}

/// `count` i.i.d. rows uniform on `{x >= 0, sum x = 1}`.
pub fn sample_uniform_simplex<R: RngCore + ?Sized>(rng: &mut R, n: usize, count: usize) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::InvalidInput("simplex dimension must be >= 2".into()));
    }
    let mut data = Vec::with_capacity(n * count);
    let mut e = vec![0.0; n];
    for _ in 0..count {
        for v in e.iter_mut() {
            *v = -(1.0 - unit_uniform(rng)).ln();
        }
        data.extend(simplex_from_exponentials(&e));
    }
    Matrix::new(count, n, data)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MstEdge {
    /// Smaller endpoint index.
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

fn squared_distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Total order on candidate edges: length, then endpoint indices.
#[inline]
fn edge_key_less(d: f64, u: usize, v: usize, best_d: f64, bu: usize, bv: usize) -> bool {
    let key = (u.min(v), u.max(v));
    let best = (bu.min(bv), bu.max(bv));
    d < best_d || (d == best_d && key < best)
}

/// Euclidean minimum spanning tree of the rows of `points` by Prim's
/// algorithm on the implicit complete graph: `O(N^2)` time, `O(N)` memory.
/// Equal lengths are ordered by `(min index, max index)`, so the tree is
/// unique. Edges are returned in the order they join the tree.
pub fn minimum_spanning_tree(points: &Matrix) -> Vec<MstEdge> {
    let count = points.rows();
    if count < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; count];
    let mut best = vec![f64::INFINITY; count];
    let mut parent = vec![0usize; count];
    in_tree[0] = true;
    for v in 1..count {
        best[v] = squared_distance(points.row(0), points.row(v));
    }
    let mut edges = Vec::with_capacity(count - 1);
    for _ in 1..count {
        let mut next = usize::MAX;
        for v in 0..count {
            if in_tree[v] {
                continue;
            }
            if next == usize::MAX
                || edge_key_less(best[v], v, parent[v], best[next], next, parent[next])
            {
                next = v;
            }
        }
        in_tree[next] = true;
        let p = parent[next];
        edges.push(MstEdge {
            a: p.min(next),
            b: p.max(next),
            weight: best[next].sqrt(),
        });
        let row = points.row(next);
        for u in 0..count {
            if in_tree[u] {
                continue;
            }
            let d = squared_distance(row, points.row(u));
            if edge_key_less(d, u, next, best[u], u, parent[u]) {
                best[u] = d;
                parent[u] = next;
            }
        }
    }
    edges
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MstTestResult {
    pub cross_edge_count: usize,
    pub expected_r: f64,
    pub variance_r: f64,
    pub z_value: f64,
    pub edge_count: usize,
    pub shared_node_pair_count: usize,
}

impl MstTestResult {
    pub fn passes(&self) -> bool {
        self.z_value >= Z_THRESHOLD
    }
}

/// Null moments `(E[R], Var[R])` for sample sizes `m`, `n` and `c` edge
/// pairs sharing a node.
pub fn null_moments(m: usize, n: usize, c: usize) -> (f64, f64) {
    let (m, n, c) = (m as f64, n as f64, c as f64);
    let total = m + n;
    let mn2 = 2.0 * m * n;
    let expected = mn2 / total + 1.0;
    let variance = mn2 / (total * (total - 1.0))
        * ((mn2 - total) / total
            + (c - total + 2.0) / ((total - 2.0) * (total - 3.0))
                * (total * (total - 1.0) - 2.0 * mn2 + 2.0));
    (expected, variance)
}

pub fn friedman_rafsky(sample_a: &Matrix, sample_b: &Matrix) -> Result<MstTestResult> {
    let dim = sample_a.cols();
    if sample_b.cols() != dim {
        return Err(Error::DimensionMismatch {
            op: "friedman_rafsky",
            left: sample_a.shape(),
            right: sample_b.shape(),
        });
    }
    let (m, n) = (sample_a.rows(), sample_b.rows());
    if m < 2 || n < 2 {
        return Err(Error::InvalidInput("each sample needs at least two points".into()));
    }
    let mut pooled = Vec::with_capacity((m + n) * dim);
    pooled.extend_from_slice(sample_a.as_slice());
    pooled.extend_from_slice(sample_b.as_slice());
    let pooled = Matrix::new(m + n, dim, pooled)?;
    let edges = minimum_spanning_tree(&pooled);

    let mut degree = vec![0usize; m + n];
    let mut cross = 0;
    for e in &edges {
        degree[e.a] += 1;
        degree[e.b] += 1;
        if (e.a < m) != (e.b < m) {
            cross += 1;
        }
    }
    let shared: usize = degree.iter().map(|&d| d * d.saturating_sub(1) / 2).sum();
    let (expected_r, variance_r) = null_moments(m, n, shared);
    if !(variance_r > 0.0) {
        return Err(Error::DegenerateTest { variance: variance_r });
    }
    Ok(MstTestResult {
        cross_edge_count: cross,
        expected_r,
        variance_r,
        z_value: (cross as f64 - expected_r) / variance_r.sqrt(),
        edge_count: edges.len(),
        shared_node_pair_count: shared,
    })
}
