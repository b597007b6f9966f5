//! Matrix hit-and-run: `z` hit-and-run walks carried as the columns of an
//! `n x z` matrix so that direction projection and chord computation become
//! matrix-matrix products.
//!
//! One iteration draws `H`, projects it (`D = P H`, or `D = H` for
//! full-dimensional bodies), computes every chord from `A X` and `A D`, then
//! moves each walk to a uniform point of its chord. Every `phi` iterations
//! the current `z` points are collected. With `z = 1` this is plain
//! hit-and-run.

pub mod chord;
pub mod directions;
pub mod rng;

use std::time::Instant;

use serde::Serialize;

use crate::chebyshev::chebyshev_center;
use crate::error::{Error, Result};
use crate::linalg::{matmul_into, Matrix};
use crate::polytope::Polytope;
use crate::projection::{ProjectionOperator, NULL_DIRECTION_NORM};

pub use chord::{advance_points, compute_lambda_intervals, draw_theta, select_points, LambdaIntervals};
pub use directions::{box_muller, fill_normals, generate_directions};
pub use rng::WalkStreams;

use chord::{chord_bounds, classify, column_chord, slack_into, Chord};
use directions::{draw_column, generate_into};

/// Redraw attempts allowed per walk and iteration before giving up.
pub const MAX_REDRAWS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    /// Number of simultaneous walks (padding).
    pub z: usize,
    /// Iterations between collected batches (thinning).
    pub phi: usize,
    /// Number of samples requested; rounded up to a multiple of `z`.
    pub t_target: usize,
    pub seed: u64,
    pub eps_dir: f64,
    pub eps_feas: f64,
    /// Iterations between equality-drift corrections; 0 disables them.
    pub reproject_every: usize,
    /// Iterations discarded before the first collection window.
    pub burn_in: usize,
}

impl SamplerConfig {
    pub const DEFAULT_EPS_DIR: f64 = 1e-11;
    pub const DEFAULT_EPS_FEAS: f64 = 1e-8;

    /// Defaults derived from the polytope: `z = max(m_in, n) + 1`,
    /// `phi = (n - m_eq)^3`, one window of burn-in, reprojection every window.
    pub fn defaults_for(p: &Polytope, t_target: usize, seed: u64) -> Self {
        let phi = default_phi(p);
        Self {
            z: default_z(p),
            phi,
            t_target,
            seed,
            eps_dir: Self::DEFAULT_EPS_DIR,
            eps_feas: Self::DEFAULT_EPS_FEAS,
            reproject_every: phi,
            burn_in: phi,
        }
    }

    /// Explicit padding and thinning with default tolerances, no burn-in and
    /// reprojection once per window.
    pub fn new(z: usize, phi: usize, t_target: usize, seed: u64) -> Self {
        Self {
            z,
            phi,
            t_target,
            seed,
            eps_dir: Self::DEFAULT_EPS_DIR,
            eps_feas: Self::DEFAULT_EPS_FEAS,
            reproject_every: phi,
            burn_in: 0,
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_reproject_every(mut self, every: usize) -> Self {
        self.reproject_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if self.z == 0 {
            return bad("z must be >= 1");
        }
        if self.phi == 0 {
            return bad("phi must be >= 1");
        }
        if self.t_target == 0 {
            return bad("t_target must be >= 1");
        }
        if !(self.eps_dir > 0.0) {
            return bad("eps_dir must be positive");
        }
        if !(self.eps_feas >= 0.0) {
            return bad("eps_feas must be non-negative");
        }
        Ok(())
    }

    /// Collection windows needed to reach `t_target`.
    pub fn windows(&self) -> usize {
        self.t_target.div_ceil(self.z)
    }
}

pub fn default_z(p: &Polytope) -> usize {
    p.m_in().max(p.dim()) + 1
}

pub fn default_phi(p: &Polytope) -> usize {
    let free = p.dim().saturating_sub(p.m_eq()).max(1);
    free.pow(3)
}

/// Counters for events the exact-arithmetic algorithm never sees.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    /// Directions that vanished under the projection.
    pub null_direction_redraws: u64,
    /// Directions whose chord was too narrow, inverted or unconstrained.
    pub chord_redraws: u64,
    pub reprojections: u64,
}

/// Positions of all walks plus counters.
#[derive(Debug, Clone)]
pub struct WalkState {
    pub x: Matrix,
    /// Samples collected so far.
    pub t: usize,
    /// Iterations since the last collection.
    pub j: usize,
    /// Iterations performed in total, burn-in included.
    pub iterations: u64,
    pub stats: RunStats,
    scratch: Scratch,
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    h: Matrix,
    d: Matrix,
    slack: Matrix,
    ad: Matrix,
    lo: Vec<f64>,
    hi: Vec<f64>,
    thetas: Vec<f64>,
    column: Vec<f64>,
    walk_major: Vec<f64>,
    projected: Vec<f64>,
    ad_column: Vec<f64>,
    slack_column: Vec<f64>,
}

impl WalkState {
    /// Every one of the `z` walks starts at `start`.
    pub fn replicated(start: &[f64], z: usize) -> Self {
        Self {
            x: Matrix::broadcast_column(start, z),
            t: 0,
            j: 0,
            iterations: 0,
            stats: RunStats::default(),
            scratch: Scratch::default(),
        }
    }

    pub fn walks(&self) -> usize {
        self.x.cols()
    }
}

/// Projects a single direction `h` into `out` with the dense projector.
fn project_column(op: &ProjectionOperator, h: &[f64], out: &mut [f64]) -> f64 {
    let p = op.matrix();
    let mut sq = 0.0;
    for (i, o) in out.iter_mut().enumerate() {
        let v: f64 = p.row(i).iter().zip(h).map(|(a, b)| a * b).sum();
        *o = v;
        sq += v * v;
    }
    sq.sqrt()
}

fn write_column(m: &mut Matrix, k: usize, values: &[f64]) {
    let z = m.cols();
    let data = m.as_mut_slice();
    for (i, &v) in values.iter().enumerate() {
        data[i * z + k] = v;
    }
}

fn read_column(m: &Matrix, k: usize, out: &mut [f64]) {
    let z = m.cols();
    let data = m.as_slice();
    for (i, o) in out.iter_mut().enumerate() {
        *o = data[i * z + k];
    }
}

/// One iteration of every walk.
///
/// Columns whose projected direction vanishes, or whose chord is degenerate,
/// redraw their own direction (up to [`MAX_REDRAWS`] times) from their own
/// stream, leaving every other column's randomness untouched. The step sizes
/// are then drawn from the shared step stream in column order.
pub fn step(
    p: &Polytope,
    op: Option<&ProjectionOperator>,
    state: &mut WalkState,
    cfg: &SamplerConfig,
    streams: &mut WalkStreams,
) -> Result<()> {
    let n = p.dim();
    let m = p.m_in();
    let z = state.walks();
    let s = &mut state.scratch;
    if s.h.shape() != (n, z) {
        s.h = Matrix::zeros(n, z);
        s.d = Matrix::zeros(n, z);
        s.lo = vec![0.0; z];
        s.hi = vec![0.0; z];
        s.thetas = vec![0.0; z];
        s.column = vec![0.0; n];
        s.walk_major = vec![0.0; n * z];
        s.projected = vec![0.0; n];
        s.ad_column = vec![0.0; m];
        s.slack_column = vec![0.0; m];
    }

    generate_into(streams, &mut s.h, &mut s.walk_major);
    if let Some(op) = op {
        let flagged = op.project_into(&s.h, &mut s.d)?;
        for k in flagged {
            let mut attempts = 0;
            loop {
                if attempts == MAX_REDRAWS {
                    return Err(Error::RetryExhausted { walk: k, attempts });
                }
                attempts += 1;
                state.stats.null_direction_redraws += 1;
                draw_column(streams, k, &mut s.column);
                write_column(&mut s.h, k, &s.column);
                if project_column(op, &s.column, &mut s.projected) > NULL_DIRECTION_NORM {
                    write_column(&mut s.d, k, &s.projected);
                    break;
                }
            }
        }
    }
    let d = if op.is_some() { &mut s.d } else { &mut s.h };

    matmul_into(p.a_in(), &state.x, &mut s.slack)?;
    slack_into(p, &mut s.slack);
    matmul_into(p.a_in(), d, &mut s.ad)?;
    chord_bounds(&s.slack, &s.ad, cfg.eps_dir, &mut s.lo, &mut s.hi);

    for k in 0..z {
        let mut chord = classify(s.lo[k], s.hi[k]);
        let mut attempts = 0;
        loop {
            match chord {
                Chord::Interval(lo, hi) => {
                    s.lo[k] = lo;
                    s.hi[k] = hi;
                    break;
                }
                Chord::Unbounded => return Err(Error::UnboundedPolytope { walk: k }),
                Chord::Narrow(..) | Chord::Parallel => {
                    if attempts == MAX_REDRAWS {
                        return Err(Error::RetryExhausted { walk: k, attempts });
                    }
                    attempts += 1;
                    state.stats.chord_redraws += 1;
                    draw_column(streams, k, &mut s.column);
                    let dir: &[f64] = match op {
                        Some(op) => {
                            if project_column(op, &s.column, &mut s.projected) <= NULL_DIRECTION_NORM {
                                chord = Chord::Parallel;
                                continue;
                            }
                            &s.projected
                        }
                        None => &s.column,
                    };
                    write_column(d, k, dir);
                    for (i, a) in s.ad_column.iter_mut().enumerate() {
                        *a = p.a_in().row(i).iter().zip(dir).map(|(x, y)| x * y).sum();
                    }
                    write_column(&mut s.ad, k, &s.ad_column);
                    read_column(&s.slack, k, &mut s.slack_column);
                    chord = column_chord(&s.slack_column, &s.ad_column, cfg.eps_dir);
                }
            }
        }
    }

    let theta_rng = streams.theta();
    for k in 0..z {
        s.thetas[k] = draw_theta(theta_rng, s.lo[k], s.hi[k]);
    }
    chord::advance_in_place(&mut state.x, d, &s.thetas);

    // New slack is the old slack minus theta * (A d); O(m z) feasibility check.
    for i in 0..m {
        let ad_row = s.ad.row(i);
        for (k, &sl) in s.slack.row(i).iter().enumerate() {
            let next = sl - s.thetas[k] * ad_row[k];
            if next < -cfg.eps_feas {
                return Err(Error::InfeasibleIterate {
                    walk: k,
                    row: i,
                    violation: -next,
                });
            }
        }
    }

    state.j += 1;
    state.iterations += 1;
    if let Some(op) = op {
        if cfg.reproject_every > 0 && state.iterations % cfg.reproject_every as u64 == 0 {
            state.x = op.reproject_points(p.b_eq(), &state.x)?;
            state.stats.reprojections += 1;
        }
    }
    Ok(())
}

/// Collected output of a run.
#[derive(Debug, Clone)]
pub struct SampleSet {
    /// One sample per row, in collection order.
    pub samples: Matrix,
    pub config: SamplerConfig,
    pub start: Vec<f64>,
    /// Wall time of the sampling loop (projection included, center excluded).
    pub seconds: f64,
    /// Raw iterates after burn-in, `z * phi * windows`.
    pub iterate_count: u64,
    pub burn_in_iterations: u64,
    pub stats: RunStats,
}

/// Hook invoked after every iteration, burn-in included.
pub trait IterateObserver {
    fn observe(&mut self, iteration: u64, x: &Matrix);
}

impl<F: FnMut(u64, &Matrix)> IterateObserver for F {
    fn observe(&mut self, iteration: u64, x: &Matrix) {
        self(iteration, x)
    }
}

struct NoObserver;

impl IterateObserver for NoObserver {
    fn observe(&mut self, _: u64, _: &Matrix) {}
}

/// Samples `p` from its Chebyshev center.
pub fn run(p: &Polytope, cfg: &SamplerConfig) -> Result<SampleSet> {
    let center = chebyshev_center(p)?;
    run_from(p, cfg, &center.x)
}

/// Samples `p` with all walks starting at `start`.
pub fn run_from(p: &Polytope, cfg: &SamplerConfig, start: &[f64]) -> Result<SampleSet> {
    run_observed(p, cfg, start, &mut NoObserver)
}

pub fn run_observed(
    p: &Polytope,
    cfg: &SamplerConfig,
    start: &[f64],
    observer: &mut dyn IterateObserver,
) -> Result<SampleSet> {
    cfg.validate()?;
    let n = p.dim();
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            op: "run",
            left: (n, 1),
            right: (start.len(), 1),
        });
    }
    if !p.contains_slice(start, cfg.eps_feas) {
        return Err(Error::InvalidInput("starting point is not inside the polytope".into()));
    }

    let clock = Instant::now();
    let op = if p.m_eq() > 0 {
        Some(ProjectionOperator::compute(p.a_eq())?)
    } else {
        None
    };
    let mut streams = WalkStreams::new(cfg.seed, cfg.z);
    let mut state = WalkState::replicated(start, cfg.z);

    for _ in 0..cfg.burn_in {
        step(p, op.as_ref(), &mut state, cfg, &mut streams)?;
        observer.observe(state.iterations, &state.x);
    }
    state.j = 0;

    let windows = cfg.windows();
    let mut samples = Vec::with_capacity(windows * cfg.z * n);
    let mut column = vec![0.0; n];
    while state.t < cfg.t_target {
        step(p, op.as_ref(), &mut state, cfg, &mut streams)?;
        observer.observe(state.iterations, &state.x);
        if state.j == cfg.phi {
            for k in 0..cfg.z {
                read_column(&state.x, k, &mut column);
                if !p.contains_slice(&column, cfg.eps_feas) {
                    let violation = p.equality_residual(&column);
                    return Err(Error::InfeasibleIterate {
                        walk: k,
                        row: usize::MAX,
                        violation,
                    });
                }
                samples.extend_from_slice(&column);
            }
            state.t += cfg.z;
            state.j = 0;
        }
    }
    let seconds = clock.elapsed().as_secs_f64();

    let rows = samples.len() / n;
    Ok(SampleSet {
        samples: Matrix::new(rows, n, samples)?,
        config: cfg.clone(),
        start: start.to_vec(),
        seconds,
        iterate_count: (cfg.z * cfg.phi * windows) as u64,
        burn_in_iterations: cfg.burn_in as u64,
        stats: state.stats,
    })
}
