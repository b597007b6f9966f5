//! Hit-and-run for a single walk, written out coordinate by coordinate.
//!
//! Shares only the random streams and the Box-Muller transform with the
//! batched sampler: directions come from stream 1, step sizes from stream 0,
//! both ChaCha8 seeded with the run seed. Hit-and-run trajectories amplify
//! last-bit differences in the normals by orders of magnitude over a few
//! thousand steps, so the transform itself is shared rather than recomputed
//! with libm. Equality constraints are limited to one row, handled by
//! removing the component of the direction along that row.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct ScalarHar {
    pub x: Vec<f64>,
    rows: Vec<(Vec<f64>, f64)>,
    eq_row: Option<Vec<f64>>,
    directions: ChaCha8Rng,
    steps: ChaCha8Rng,
    eps_dir: f64,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / 9_007_199_254_740_992.0
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ScalarHar {
    pub fn new(start: Vec<f64>, rows: Vec<(Vec<f64>, f64)>, eq_row: Option<Vec<f64>>, seed: u64) -> Self {
        let mut directions = ChaCha8Rng::seed_from_u64(seed);
        directions.set_stream(1);
        let mut steps = ChaCha8Rng::seed_from_u64(seed);
        steps.set_stream(0);
        Self { x: start, rows, eq_row, directions, steps, eps_dir: 1e-11 }
    }

    fn normal_vector(&mut self) -> Vec<f64> {
        let n = self.x.len();
        let mut h = Vec::with_capacity(n + 1);
        while h.len() < n {
            let u1 = 1.0 - uniform(&mut self.directions);
            let u2 = uniform(&mut self.directions);
            let (c, s) = mhar::sampler::box_muller(u1, u2);
            h.push(c);
            h.push(s);
        }
        h.truncate(n);
        h
    }

    pub fn step(&mut self) {
        let mut d = self.normal_vector();
        if let Some(a) = &self.eq_row {
            let c = dot(a, &d) / dot(a, a);
            for (di, ai) in d.iter_mut().zip(a) {
                *di -= c * ai;
            }
        }
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (a, b) in &self.rows {
            let ad = dot(a, &d);
            let lambda = (b - dot(a, &self.x)) / ad;
            if ad > self.eps_dir {
                hi = hi.min(lambda);
            } else if ad < -self.eps_dir {
                lo = lo.max(lambda);
            }
        }
        assert!(lo.is_finite() && hi.is_finite() && hi > lo, "degenerate chord ({lo}, {hi})");
        let theta = loop {
            let t = lo + uniform(&mut self.steps) * (hi - lo);
            if t > lo && t < hi {
                break t;
            }
        };
        for (xi, di) in self.x.iter_mut().zip(&d) {
            *xi += theta * di;
        }
    }
}

/// Box `[-1, 1]^n` as rows `x_i <= 1`, `-x_i <= 1`.
pub fn cube_rows(n: usize) -> Vec<(Vec<f64>, f64)> {
    let unit = |i: usize, s: f64| (0..n).map(|j| if j == i { s } else { 0.0 }).collect::<Vec<_>>();
    (0..n).map(|i| (unit(i, 1.0), 1.0)).chain((0..n).map(|i| (unit(i, -1.0), 1.0))).collect()
}

/// Nonnegativity rows `-x_i <= 0` of the probability simplex.
pub fn simplex_rows(n: usize) -> Vec<(Vec<f64>, f64)> {
    (0..n)
        .map(|i| ((0..n).map(|j| if j == i { -1.0 } else { 0.0 }).collect(), 0.0))
        .collect()
}

/// Largest coordinate gap between the batched sampler (z = 1) and the scalar
/// walk over `steps` iterations from `start`.
pub fn max_trajectory_gap(p: &mhar::Polytope, oracle: &mut ScalarHar, start: &[f64], steps: usize, seed: u64) -> f64 {
    use mhar::sampler::{run_observed, SamplerConfig};
    let cfg = SamplerConfig::new(1, 1, steps, seed).with_reproject_every(0);
    let mut gap: f64 = 0.0;
    let mut seen = 0;
    let mut observe = |_: u64, x: &mhar::Matrix| {
        oracle.step();
        seen += 1;
        for (a, b) in x.as_slice().iter().zip(&oracle.x) {
            gap = gap.max((a - b).abs());
        }
    };
    run_observed(p, &cfg, start, &mut observe).expect("sampler runs");
    assert_eq!(seen, steps);
    gap
}
