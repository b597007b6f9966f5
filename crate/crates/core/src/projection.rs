//! Orthogonal projection onto the null space of the equality rows,
//! `P = I - A_eq' (A_eq A_eq')^-1 A_eq`.

use crate::error::{Error, Result};
use crate::linalg::{invert, matmul, matmul_into, transpose, Matrix};

/// Columns whose Euclidean norm after projection is at or below this are
/// reported instead of being used as directions.
pub const NULL_DIRECTION_NORM: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ProjectionOperator {
    p: Matrix,
    gram_inverse: Matrix,
    source_eq: Matrix,
    source_eq_t: Matrix,
}

/// Output of [`ProjectionOperator::project_directions`].
#[derive(Debug, Clone)]
pub struct ProjectedDirections {
    pub directions: Matrix,
    /// Columns that collapsed to (near) zero and must be redrawn.
    pub flagged: Vec<usize>,
}

impl ProjectionOperator {
    /// Builds the projector in five steps: Gram matrix, its inverse,
    /// `A' G^-1`, `A' G^-1 A`, then subtraction from the identity.
    pub fn compute(a_eq: &Matrix) -> Result<Self> {
        let (m, n) = a_eq.shape();
        if m == 0 || m >= n {
            return Err(Error::InvalidInput(format!(
                "projection needs 0 < m_eq < n, got {m} equalities in dimension {n}"
            )));
        }
        let a_t = transpose(a_eq);
        let gram = matmul(a_eq, &a_t)?;
        let gram_inverse = invert(&gram).map_err(|e| match e {
            Error::Singular { pivot, .. } => Error::RankDeficientEq { pivot },
            other => other,
        })?;
        let left = matmul(&a_t, &gram_inverse)?;
        let range = matmul(&left, a_eq)?;
        let p = Matrix::identity(n).sub(&range)?;
        Ok(Self {
            p,
            gram_inverse,
            source_eq: a_eq.clone(),
            source_eq_t: a_t,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn gram_inverse(&self) -> &Matrix {
        &self.gram_inverse
    }

    pub fn source_eq(&self) -> &Matrix {
        &self.source_eq
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    /// `D = P H`, flagging columns that vanish under the projection.
    pub fn project_directions(&self, h: &Matrix) -> Result<ProjectedDirections> {
        let mut directions = Matrix::zeros(self.dim(), h.cols());
        let flagged = self.project_into(h, &mut directions)?;
        Ok(ProjectedDirections {
            directions,
            flagged,
        })
    }

    /// Allocation-free form of [`Self::project_directions`].
    pub fn project_into(&self, h: &Matrix, out: &mut Matrix) -> Result<Vec<usize>> {
        matmul_into(&self.p, h, out)?;
        Ok(null_columns(out))
    }

    /// Pulls every column of `x` back onto `A_eq x = b_eq`:
    /// `x - A_eq' G^-1 (A_eq x - b_eq)`.
    pub fn reproject_points(&self, b_eq: &Matrix, x: &Matrix) -> Result<Matrix> {
        let mut residual = matmul(&self.source_eq, x)?;
        if b_eq.shape() != (residual.rows(), 1) {
            return Err(Error::DimensionMismatch {
                op: "reproject_points",
                left: self.source_eq.shape(),
                right: b_eq.shape(),
            });
        }
        for i in 0..residual.rows() {
            let b = b_eq[(i, 0)];
            residual.row_mut(i).iter_mut().for_each(|r| *r -= b);
        }
        let weights = matmul(&self.gram_inverse, &residual)?;
        let correction = matmul(&self.source_eq_t, &weights)?;
        x.sub(&correction)
    }
}

/// Indices of columns whose norm is at most [`NULL_DIRECTION_NORM`].
pub fn null_columns(d: &Matrix) -> Vec<usize> {
    let mut sq = vec![0.0; d.cols()];
    for i in 0..d.rows() {
        for (s, v) in sq.iter_mut().zip(d.row(i)) {
            *s += v * v;
        }
    }
    sq.iter()
        .enumerate()
        .filter(|(_, &s)| s.sqrt() <= NULL_DIRECTION_NORM)
        .map(|(k, _)| k)
        .collect()
}
