//! Chebyshev center: the center of the largest ball inscribed in the
//! polytope, used as the strictly interior starting point of every walk.
//!
//! The center solves
//!
//! ```text
//! max r  s.t.  A_eq x = b_eq,
//!              a_i . x + r ||a_i||_2 <= b_i   for every inequality row i,
//!              x free, r >= 0,
//! ```
//!
//! which is handed to the dense simplex solver in [`simplex`].

pub mod simplex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polytope::Polytope;

pub use simplex::solve_lp;

/// Radius at or below which the polytope is treated as having no interior.
pub const MIN_RADIUS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowKind {
    Le,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarBound {
    Free,
    NonNegative,
}

/// `max objective . v` subject to rows of the given kinds.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Matrix,
    pub constraint_matrix: Matrix,
    pub constraint_rhs: Matrix,
    pub row_kinds: Vec<RowKind>,
    pub variable_bounds: Vec<VarBound>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.objective.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.constraint_matrix.rows()
    }

    fn check_shapes(&self) -> Result<()> {
        let v = self.num_vars();
        let c = self.num_rows();
        let ok = self.objective.rows() == 1
            && self.constraint_matrix.cols() == v
            && self.constraint_rhs.shape() == (c, 1)
            && self.row_kinds.len() == c
            && self.variable_bounds.len() == v;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "inconsistent LP shapes: objective {:?}, matrix {:?}, rhs {:?}, {} kinds, {} bounds",
                self.objective.shape(),
                self.constraint_matrix.shape(),
                self.constraint_rhs.shape(),
                self.row_kinds.len(),
                self.variable_bounds.len()
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Option<Matrix>,
    pub objective_value: f64,
    pub pivots: usize,
}

impl LpSolution {
    fn infeasible() -> Self {
        Self {
            status: LpStatus::Infeasible,
            x: None,
            objective_value: f64::NAN,
            pivots: 0,
        }
    }

    fn unbounded() -> Self {
        Self {
            status: LpStatus::Unbounded,
            x: None,
            objective_value: f64::INFINITY,
            pivots: 0,
        }
    }
}

/// Euclidean norm of every row of `a`, computed once in `O(m n)`.
pub fn row_norms(a: &Matrix) -> Vec<f64> {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect()
}

/// Lays out the inscribed-ball program with variables `(x_1..x_n, r)`:
/// equality rows first, then one `<=` row per inequality.
pub fn build_chebyshev_lp(p: &Polytope) -> LpProblem {
    let n = p.dim();
    let v = n + 1;
    let rows = p.m_eq() + p.m_in();
    let mut a = Matrix::zeros(rows, v);
    let mut rhs = Matrix::zeros(rows, 1);
    let mut kinds = Vec::with_capacity(rows);
    for i in 0..p.m_eq() {
        a.row_mut(i)[..n].copy_from_slice(p.a_eq().row(i));
        rhs[(i, 0)] = p.b_eq()[(i, 0)];
        kinds.push(RowKind::Eq);
    }
    let norms = row_norms(p.a_in());
    for i in 0..p.m_in() {
        let r = p.m_eq() + i;
        a.row_mut(r)[..n].copy_from_slice(p.a_in().row(i));
        a[(r, n)] = norms[i];
        rhs[(r, 0)] = p.b_in()[(i, 0)];
        kinds.push(RowKind::Le);
    }
    let mut objective = Matrix::zeros(1, v);
    objective[(0, n)] = 1.0;
    let mut bounds = vec![VarBound::Free; n];
    bounds.push(VarBound::NonNegative);
    LpProblem {
        objective,
        constraint_matrix: a,
        constraint_rhs: rhs,
        row_kinds: kinds,
        variable_bounds: bounds,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChebyshevCenter {
    pub x: Vec<f64>,
    pub radius: f64,
}

impl ChebyshevCenter {
    pub fn point(&self) -> Matrix {
        Matrix::column_vector(&self.x)
    }
}

pub fn chebyshev_center(p: &Polytope) -> Result<ChebyshevCenter> {
    let lp = build_chebyshev_lp(p);
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Infeasible => Err(Error::EmptyPolytope),
        LpStatus::Unbounded => Err(Error::UnboundedProgram),
        LpStatus::Optimal => {
            let mut v = sol.x.expect("optimal solutions carry x").into_vec();
            let radius = v.pop().expect("n + 1 variables");
            if radius <= MIN_RADIUS {
                return Err(Error::NoInterior { radius });
            }
            Ok(ChebyshevCenter { x: v, radius })
        }
    }
}
