//! Dense two-phase primal simplex on a full tableau.
//!
//! Entering columns are chosen by Dantzig's largest-reduced-cost rule until a
//! run of degenerate pivots is seen, after which Bland's smallest-index rule
//! takes over for the rest of the phase. A hard pivot budget backs this up.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::{LpProblem, LpSolution, LpStatus, RowKind, VarBound};

/// Primal feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Reduced-cost optimality tolerance.
pub const OPTIMALITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const DEGENERATE_STREAK_FOR_BLAND: usize = 25;

struct Tableau {
    /// `rows x (cols + 1)`; last column is the right-hand side.
    t: Vec<f64>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    /// Reduced costs for the current phase, last entry is `-objective`.
    cost_row: Vec<f64>,
    pivots: usize,
    budget: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                for (v, pr) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                self.t[i * w + c] = 0.0;
            }
        }
        let f = self.cost_row[c];
        if f != 0.0 {
            for (v, pr) in self.cost_row.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.cost_row[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Loads minimisation costs and prices out the current basis.
    fn set_costs(&mut self, costs: &[f64]) {
        let w = self.cols + 1;
        let mut row = vec![0.0; w];
        row[..self.cols].copy_from_slice(costs);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb != 0.0 {
                for (v, tv) in row.iter_mut().zip(&self.t[i * w..(i + 1) * w]) {
                    *v -= cb * tv;
                }
            }
        }
        self.cost_row = row;
    }

    fn run_phase(&mut self, allowed: &[bool]) -> Result<PhaseOutcome> {
        let mut bland = false;
        let mut degenerate_streak = 0;
        loop {
            if self.pivots >= self.budget {
                return Err(Error::CycleSuspected {
                    pivots: self.pivots,
                });
            }
            let candidates = (0..self.cols)
                .filter(|&j| allowed[j] && self.cost_row[j] < -OPTIMALITY_TOL);
            let entering = if bland {
                candidates.min()
            } else {
                candidates.fold(None, |best: Option<usize>, j| match best {
                    Some(b) if self.cost_row[b] <= self.cost_row[j] => Some(b),
                    _ => Some(j),
                })
            };
            let Some(c) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };

            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    let better = match leaving {
                        None => true,
                        Some((r, best)) => {
                            ratio < best || (ratio == best && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leaving else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if ratio == 0.0 {
                degenerate_streak += 1;
                if degenerate_streak >= DEGENERATE_STREAK_FOR_BLAND {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Solves `lp` (a maximisation) to optimality, infeasibility or unboundedness.
pub fn solve_lp(lp: &LpProblem) -> Result<LpSolution> {
    lp.check_shapes()?;
    let nv = lp.num_vars();
    let nc = lp.num_rows();

    // Standard-form columns: structural (free ones split), slacks, artificials.
    let mut col_of_var = Vec::with_capacity(nv);
    let mut next = 0;
    for b in &lp.variable_bounds {
        col_of_var.push(next);
        next += match b {
            VarBound::Free => 2,
            VarBound::NonNegative => 1,
        };
    }
    let structural = next;
    let slack_count = lp.row_kinds.iter().filter(|k| **k == RowKind::Le).count();

    let mut sign = vec![1.0; nc];
    let mut needs_artificial = vec![false; nc];
    for i in 0..nc {
        let rhs = lp.constraint_rhs[(i, 0)];
        if rhs < 0.0 {
            sign[i] = -1.0;
        }
        needs_artificial[i] = lp.row_kinds[i] == RowKind::Eq || rhs < 0.0;
    }
    let artificial_count = needs_artificial.iter().filter(|&&a| a).count();
    let cols = structural + slack_count + artificial_count;
    let w = cols + 1;

    let mut t = vec![0.0; nc * w];
    let mut basis = vec![0; nc];
    let mut slack_col = structural;
    let mut art_col = structural + slack_count;
    for i in 0..nc {
        let s = sign[i];
        let row = &mut t[i * w..(i + 1) * w];
        for v in 0..nv {
            let a = lp.constraint_matrix[(i, v)] * s;
            let c = col_of_var[v];
            row[c] = a;
            if lp.variable_bounds[v] == VarBound::Free {
                row[c + 1] = -a;
            }
        }
        row[cols] = lp.constraint_rhs[(i, 0)] * s;
        if lp.row_kinds[i] == RowKind::Le {
            row[slack_col] = s;
            if !needs_artificial[i] {
                basis[i] = slack_col;
            }
            slack_col += 1;
        }
        if needs_artificial[i] {
            row[art_col] = 1.0;
            basis[i] = art_col;
            art_col += 1;
        }
    }

    let budget = 50 * (nc + cols).max(20);
    let mut tab = Tableau {
        t,
        rows: nc,
        cols,
        basis,
        cost_row: Vec::new(),
        pivots: 0,
        budget,
    };
    let first_art = structural + slack_count;
    let is_artificial = |j: usize| j >= first_art;

    if artificial_count > 0 {
        let mut phase1 = vec![0.0; cols];
        phase1[first_art..].iter_mut().for_each(|c| *c = 1.0);
        tab.set_costs(&phase1);
        let all = vec![true; cols];
        tab.run_phase(&all)?;
        let infeasibility = -tab.cost_row[cols];
        let scale = 1.0 + lp.constraint_rhs.max_abs();
        if infeasibility > FEASIBILITY_TOL * scale {
            return Ok(LpSolution::infeasible());
        }
        // Drive remaining zero-level artificials out of the basis; rows where
        // that is impossible are redundant and are dropped.
        let mut redundant = Vec::new();
        for r in 0..tab.rows {
            if !is_artificial(tab.basis[r]) {
                continue;
            }
            let replacement = (0..first_art)
                .filter(|&j| tab.at(r, j).abs() > 1e-9)
                .max_by(|&a, &b| tab.at(r, a).abs().total_cmp(&tab.at(r, b).abs()));
            match replacement {
                Some(c) => tab.pivot(r, c),
                None => redundant.push(r),
            }
        }
        if !redundant.is_empty() {
            let keep: Vec<usize> = (0..tab.rows).filter(|r| !redundant.contains(r)).collect();
            let mut t = Vec::with_capacity(keep.len() * w);
            for &r in &keep {
                t.extend_from_slice(&tab.t[r * w..(r + 1) * w]);
            }
            tab.basis = keep.iter().map(|&r| tab.basis[r]).collect();
            tab.t = t;
            tab.rows = keep.len();
        }
    }

    let mut costs = vec![0.0; cols];
    for v in 0..nv {
        let c = -lp.objective[(0, v)];
        costs[col_of_var[v]] = c;
        if lp.variable_bounds[v] == VarBound::Free {
            costs[col_of_var[v] + 1] = -c;
        }
    }
    tab.set_costs(&costs);
    let allowed: Vec<bool> = (0..cols).map(|j| !is_artificial(j)).collect();
    if let PhaseOutcome::Unbounded = tab.run_phase(&allowed)? {
        return Ok(LpSolution::unbounded());
    }

    let mut values = vec![0.0; cols];
    for (r, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.rhs(r);
    }
    let x: Vec<f64> = (0..nv)
        .map(|v| {
            let c = col_of_var[v];
            match lp.variable_bounds[v] {
                VarBound::Free => values[c] - values[c + 1],
                VarBound::NonNegative => values[c],
            }
        })
        .collect();
    let objective_value = (0..nv).map(|v| lp.objective[(0, v)] * x[v]).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x: Some(Matrix::column_vector(&x)),
        objective_value,
        pivots: tab.pivots,
    })
}
