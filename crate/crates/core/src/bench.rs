//! Throughput harness.
//!
//! Average samples per second counts raw iterates, `z * phi * T / seconds`,
//! where `T` is the number of collection windows. The thinned count `z * T`
//! is reported next to it. Timed work is the sampling loop including the
//! projection-matrix build; polytope loading and the Chebyshev solve happen
//! once, before the clock starts. Burn-in is disabled while timing.

use std::time::Instant;

use serde::Serialize;

use crate::chebyshev::chebyshev_center;
use crate::error::{Error, Result};
use crate::polytope::Polytope;
use crate::sampler::{run_from, SamplerConfig};

pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const TIMING_SCOPE: &str = "sampling loop incl. projection build; excludes load and center";

/// Source of monotonic time in seconds.
pub trait Clock {
    fn now(&mut self) -> f64;
}

#[derive(Debug)]
pub struct SystemClock(Instant);

impl Default for SystemClock {
    fn default() -> Self {
        Self(Instant::now())
    }
}

impl Clock for SystemClock {
    fn now(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTiming {
    pub seed: u64,
    pub seconds: f64,
    pub samples_per_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub figure: String,
    pub n: usize,
    pub z: usize,
    pub phi: usize,
    pub t_repeats: usize,
    /// `z * phi * T`, the raw iterates per run.
    pub total_samples: u64,
    /// `z * T`, the collected points per run.
    pub thinned_samples: u64,
    pub mean_seconds: f64,
    pub mean_sps: f64,
    pub std_sps: f64,
    pub repetitions: Vec<RunTiming>,
}

impl BenchRecord {
    /// Aggregates per-run wall times (seconds) for one configuration.
    pub fn from_timings(
        figure: &str,
        n: usize,
        z: usize,
        phi: usize,
        t_repeats: usize,
        runs: &[(u64, f64)],
    ) -> Result<Self> {
        if t_repeats == 0 || runs.is_empty() {
            return Err(Error::InvalidInput("T and repetitions must be >= 1".into()));
        }
        let total = (z * phi * t_repeats) as u64;
        let repetitions: Vec<RunTiming> = runs
            .iter()
            .map(|&(seed, seconds)| RunTiming {
                seed,
                seconds,
                samples_per_second: total as f64 / seconds,
            })
            .collect();
        let k = repetitions.len() as f64;
        let mean_sps = repetitions.iter().map(|r| r.samples_per_second).sum::<f64>() / k;
        let std_sps = if repetitions.len() > 1 {
            let ss: f64 = repetitions
                .iter()
                .map(|r| (r.samples_per_second - mean_sps).powi(2))
                .sum();
            (ss / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            figure: figure.to_string(),
            n,
            z,
            phi,
            t_repeats,
            total_samples: total,
            thinned_samples: (z * t_repeats) as u64,
            mean_seconds: repetitions.iter().map(|r| r.seconds).sum::<f64>() / k,
            mean_sps,
            std_sps,
            repetitions,
        })
    }
}

pub fn measure_throughput(
    figure: &str,
    p: &Polytope,
    cfg: &SamplerConfig,
    repetitions: usize,
) -> Result<BenchRecord> {
    measure_throughput_with(figure, p, cfg, repetitions, &mut SystemClock::default())
}

/// Runs the sampler `repetitions` times with seeds `cfg.seed + r`.
pub fn measure_throughput_with(
    figure: &str,
    p: &Polytope,
    cfg: &SamplerConfig,
    repetitions: usize,
    clock: &mut dyn Clock,
) -> Result<BenchRecord> {
    if repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be >= 1".into()));
    }
    cfg.validate()?;
    let center = chebyshev_center(p)?;
    let mut runs = Vec::with_capacity(repetitions);
    for r in 0..repetitions {
        let seed = cfg.seed.wrapping_add(r as u64);
        let run_cfg = SamplerConfig {
            seed,
            burn_in: 0,
            ..cfg.clone()
        };
        let start = clock.now();
        run_from(p, &run_cfg, &center.x)?;
        runs.push((seed, clock.now() - start));
    }
    BenchRecord::from_timings(figure, p.dim(), cfg.z, cfg.phi, cfg.windows(), &runs)
}

/// One record per padding value; every record keeps `cfg_base`'s thinning
/// and window count `T`.
pub fn sweep_padding(
    figure: &str,
    p: &Polytope,
    z_values: &[usize],
    cfg_base: &SamplerConfig,
    repetitions: usize,
) -> Result<Vec<BenchRecord>> {
    sweep_padding_with(figure, p, z_values, cfg_base, repetitions, &mut SystemClock::default())
}

pub fn sweep_padding_with(
    figure: &str,
    p: &Polytope,
    z_values: &[usize],
    cfg_base: &SamplerConfig,
    repetitions: usize,
    clock: &mut dyn Clock,
) -> Result<Vec<BenchRecord>> {
    if z_values.is_empty() {
        return Err(Error::InvalidInput("z_values must not be empty".into()));
    }
    let windows = cfg_base.windows();
    z_values
        .iter()
        .map(|&z| {
            let cfg = SamplerConfig {
                z,
                t_target: z * windows,
                ..cfg_base.clone()
            };
            measure_throughput_with(figure, p, &cfg, repetitions, clock)
        })
        .collect()
}

pub const CSV_HEADER: &str = "figure,n,z,phi,T,total_samples,mean_sps,std_sps,runs";

/// Delimiter-separated report, one configuration per line.
pub fn report_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.figure,
            r.n,
            r.z,
            r.phi,
            r.t_repeats,
            r.total_samples,
            r.mean_sps,
            r.std_sps,
            r.repetitions.len()
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    format_version: u32,
    timing_scope: &'a str,
    records: &'a [BenchRecord],
}

pub fn report_json(records: &[BenchRecord]) -> String {
    serde_json::to_string_pretty(&JsonReport {
        format_version: REPORT_FORMAT_VERSION,
        timing_scope: TIMING_SCOPE,
        records,
    })
    .expect("plain data serializes")
}
