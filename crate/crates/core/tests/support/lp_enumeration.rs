//! Exhaustive vertex enumeration for the Chebyshev-center LP.

use mhar::Polytope;

/// Gaussian elimination with partial pivoting; `None` when (near) singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Largest inscribed radius by trying every vertex of
/// `{(x, r) : A_eq x = b_eq, a_i x + |a_i| r <= b_i, r >= 0}`.
pub fn brute_force_radius(p: &Polytope) -> f64 {
    let n = p.dim();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..p.m_in() {
        let a = p.a_in().row(i);
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut r = a.to_vec();
        r.push(norm);
        rows.push((r, p.b_in()[(i, 0)]));
    }
    let mut r_nonneg = vec![0.0; n];
    r_nonneg.push(-1.0);
    rows.push((r_nonneg, 0.0));
    let eq: Vec<(Vec<f64>, f64)> = (0..p.m_eq())
        .map(|i| {
            let mut r = p.a_eq().row(i).to_vec();
            r.push(0.0);
            (r, p.b_eq()[(i, 0)])
        })
        .collect();

    let free = n + 1 - eq.len();
    let mut best = f64::NEG_INFINITY;
    for active in subsets(rows.len(), free) {
        let system: Vec<&(Vec<f64>, f64)> = eq.iter().chain(active.iter().map(|&i| &rows[i])).collect();
        let a = system.iter().map(|(r, _)| r.clone()).collect();
        let b = system.iter().map(|(_, v)| *v).collect();
        let Some(v) = solve(a, b) else { continue };
        let feasible = rows
            .iter()
            .all(|(r, bi)| r.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() <= bi + 1e-9);
        if feasible {
            best = best.max(v[n]);
        }
    }
    best
}
