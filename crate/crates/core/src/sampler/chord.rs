//! Chords through the polytope and uniform points on them.
//!
//! For walk `k` at `x^k` with direction `d^k`, every inequality row gives
//! `lambda_i = (b_i - a_i x^k) / (a_i d^k)`. Rows with a positive denominator
//! bound the step from above, rows with a negative one from below, so the
//! chord is `(max over negative rows, min over positive rows)`.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{matmul, Matrix};
use crate::polytope::Polytope;

use super::rng::unit_uniform;

/// Intervals narrower than this are treated as degenerate.
pub const MIN_CHORD_WIDTH: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaIntervals {
    pub lambda_min: Vec<f64>,
    pub lambda_max: Vec<f64>,
    pub degenerate_flags: Vec<bool>,
}

impl LambdaIntervals {
    pub fn len(&self) -> usize {
        self.lambda_min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_min.is_empty()
    }
}

/// Per-column classification before error mapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Chord {
    Interval(f64, f64),
    /// Too narrow or inverted by rounding; the walk should redraw.
    Narrow(f64, f64),
    Unbounded,
    /// No row constrains the direction at all.
    Parallel,
}

#[inline]
pub(crate) fn classify(lo: f64, hi: f64) -> Chord {
    match (lo == f64::NEG_INFINITY, hi == f64::INFINITY) {
        (true, true) => Chord::Parallel,
        (true, false) | (false, true) => Chord::Unbounded,
        (false, false) if hi - lo > MIN_CHORD_WIDTH => Chord::Interval(lo, hi),
        _ => Chord::Narrow(lo, hi),
    }
}

/// Running chord bounds for all walks from slack `S = B - A X` and `A D`,
/// both `m x z`. Rows with `|a_i d^k| <= eps_dir` are skipped.
pub(crate) fn chord_bounds(slack: &Matrix, ad: &Matrix, eps_dir: f64, lo: &mut [f64], hi: &mut [f64]) {
    lo.fill(f64::NEG_INFINITY);
    hi.fill(f64::INFINITY);
    for i in 0..slack.rows() {
        // Branch-free so the loop vectorizes; signs of `a` are random.
        let rows = slack.row(i).iter().zip(ad.row(i));
        for ((&s, &a), (lo, hi)) in rows.zip(lo.iter_mut().zip(hi.iter_mut())) {
            let l = s / a;
            let upper = if a > eps_dir { l } else { f64::INFINITY };
            let lower = if a < -eps_dir { l } else { f64::NEG_INFINITY };
            *hi = hi.min(upper);
            *lo = lo.max(lower);
        }
    }
}

/// Chord of a single walk from its slack and `A d` columns.
pub(crate) fn column_chord(slack: &[f64], ad: &[f64], eps_dir: f64) -> Chord {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (&s, &a) in slack.iter().zip(ad) {
        if a > eps_dir {
            hi = hi.min(s / a);
        } else if a < -eps_dir {
            lo = lo.max(s / a);
        }
    }
    classify(lo, hi)
}

/// `B - A X` for the inequality rows.
pub(crate) fn slack_into(p: &Polytope, ax: &mut Matrix) {
    let b = p.b_in();
    for i in 0..ax.rows() {
        let bi = b[(i, 0)];
        ax.row_mut(i).iter_mut().for_each(|v| *v = bi - *v);
    }
}

/// Chord intervals `(lambda_min, lambda_max)` for every walk.
///
/// Walks whose interval is narrower than [`MIN_CHORD_WIDTH`] (or inverted by
/// rounding) are flagged. A chord open on either side means the polytope is
/// unbounded; a direction constrained by no row at all is degenerate.
pub fn compute_lambda_intervals(
    p: &Polytope,
    x: &Matrix,
    d: &Matrix,
    eps_dir: f64,
) -> Result<LambdaIntervals> {
    if x.shape() != d.shape() {
        return Err(Error::DimensionMismatch {
            op: "compute_lambda_intervals",
            left: x.shape(),
            right: d.shape(),
        });
    }
    let mut slack = matmul(p.a_in(), x)?;
    slack_into(p, &mut slack);
    let ad = matmul(p.a_in(), d)?;
    let z = x.cols();
    let mut lo = vec![0.0; z];
    let mut hi = vec![0.0; z];
    chord_bounds(&slack, &ad, eps_dir, &mut lo, &mut hi);
    let mut flags = vec![false; z];
    for k in 0..z {
        match classify(lo[k], hi[k]) {
            Chord::Interval(..) => {}
            Chord::Narrow(..) => flags[k] = true,
            Chord::Unbounded => return Err(Error::UnboundedPolytope { walk: k }),
            Chord::Parallel => return Err(Error::DirectionDegenerate { walk: k }),
        }
    }
    Ok(LambdaIntervals {
        lambda_min: lo,
        lambda_max: hi,
        degenerate_flags: flags,
    })
}

/// Uniform step size strictly inside `(lo, hi)`; endpoints are redrawn.
#[inline]
pub fn draw_theta<R: RngCore + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    loop {
        let u = unit_uniform(rng);
        let theta = lo + u * (hi - lo);
        if theta > lo && theta < hi {
            return theta;
        }
    }
}

/// `x^k + theta^k d^k` for every column.
pub fn advance_points(x: &Matrix, d: &Matrix, thetas: &[f64]) -> Result<Matrix> {
    if x.shape() != d.shape() || thetas.len() != x.cols() {
        return Err(Error::DimensionMismatch {
            op: "advance_points",
            left: x.shape(),
            right: d.shape(),
        });
    }
    let mut out = x.clone();
    advance_in_place(&mut out, d, thetas);
    Ok(out)
}

#[inline]
pub(crate) fn advance_in_place(x: &mut Matrix, d: &Matrix, thetas: &[f64]) {
    let z = x.cols();
    for i in 0..x.rows() {
        let d_row = &d.as_slice()[i * z..(i + 1) * z];
        for ((xv, &dv), &t) in x.row_mut(i).iter_mut().zip(d_row).zip(thetas) {
            *xv += t * dv;
        }
    }
}

/// Moves every walk to a uniform point of its chord and checks the result
/// against the inequalities within `eps_feas`.
pub fn select_points<R: RngCore + ?Sized>(
    rng: &mut R,
    p: &Polytope,
    x: &Matrix,
    d: &Matrix,
    iv: &LambdaIntervals,
    eps_feas: f64,
) -> Result<Matrix> {
    if let Some(k) = iv.degenerate_flags.iter().position(|&f| f) {
        return Err(Error::DirectionDegenerate { walk: k });
    }
    let thetas: Vec<f64> = (0..iv.len())
        .map(|k| draw_theta(rng, iv.lambda_min[k], iv.lambda_max[k]))
        .collect();
    let next = advance_points(x, d, &thetas)?;
    let mut slack = matmul(p.a_in(), &next)?;
    slack_into(p, &mut slack);
    for i in 0..slack.rows() {
        for (k, &s) in slack.row(i).iter().enumerate() {
            if s < -eps_feas {
                return Err(Error::InfeasibleIterate {
                    walk: k,
                    row: i,
                    violation: -s,
                });
            }
        }
    }
    Ok(next)
}
