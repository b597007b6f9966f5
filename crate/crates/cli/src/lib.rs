//! Command-line front end: load or generate a polytope, then sample it,
//! find its Chebyshev center, test a sample file for uniformity, or
//! benchmark throughput.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use mhar::bench::{report_csv, report_json, sweep_padding};
use mhar::chebyshev::chebyshev_center;
use mhar::polytope::{make_hypercube, make_simplex};
use mhar::sampler::{run_from, RunStats, SamplerConfig};
use mhar::stats::{friedman_rafsky, sample_uniform_hypercube, sample_uniform_simplex, MstTestResult, Z_THRESHOLD};
use mhar::{Matrix, Polytope};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_NO_INTERIOR: i32 = 4;
pub const EXIT_UNBOUNDED: i32 = 5;
pub const EXIT_NUMERICAL: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "mhar", version, about = "Uniform sampling of convex polytopes with batched hit-and-run")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples and write them as CSV plus a run manifest.
    Sample(SampleArgs),
    /// Print the Chebyshev center and radius.
    Center(SourceArgs),
    /// Friedman-Rafsky test of a sample file against uniform reference points.
    TestUniformity(TestArgs),
    /// Measure samples per second over a list of padding values.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Hypercube,
    Simplex,
    File,
}

/// Where the polytope comes from: a generator (`--figure` with `--dim`) or a
/// JSON file (`--in`, optionally with `--figure file`).
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[arg(long, value_enum)]
    pub figure: Option<Figure>,
    #[arg(long = "dim")]
    pub dim: Option<usize>,
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Number of walks; defaults to max(m_in, n) + 1.
    #[arg(long)]
    pub z: Option<usize>,
    /// Iterations between collections; defaults to (n - m_eq)^3.
    #[arg(long)]
    pub phi: Option<usize>,
    /// Samples requested, rounded up to a multiple of z.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Feasibility tolerance.
    #[arg(long, default_value_t = SamplerConfig::DEFAULT_EPS_FEAS)]
    pub eps: f64,
    /// Iterations between equality-drift corrections (0 = never); defaults to phi.
    #[arg(long)]
    pub reproject_every: Option<usize>,
    /// Iterations discarded first; defaults to phi.
    #[arg(long)]
    pub burn_in: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// CSV file of samples to test (header row, one point per row).
    #[arg(long, value_name = "PATH")]
    pub sample_file: PathBuf,
    /// CSV file of reference points; generated uniformly when absent.
    #[arg(long, value_name = "PATH")]
    pub reference_file: Option<PathBuf>,
    /// Number of generated reference points; defaults to the sample count.
    #[arg(long)]
    pub reference_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Report path; `.json` selects JSON, anything else CSV. Printed when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub z_list: Vec<usize>,
    #[arg(long)]
    pub phi: Option<usize>,
    /// Collection windows per run.
    #[arg(long, default_value_t = 1)]
    pub windows: usize,
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("USAGE: {0}")]
    Usage(String),
    #[error("IO_ERROR: {0}")]
    Io(String),
    #[error("{code}: {0}", code = .0.code())]
    Core(#[from] mhar::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Core(e) => exit_code_for(e),
        }
    }
}

pub fn exit_code_for(e: &mhar::Error) -> i32 {
    match e.code() {
        "EMPTY_POLYTOPE" => EXIT_EMPTY,
        "NO_INTERIOR" => EXIT_NO_INTERIOR,
        "UNBOUNDED_POLYTOPE" => EXIT_UNBOUNDED,
        "DIMENSION_MISMATCH" | "INVALID_INPUT" | "RANK_DEFICIENT_EQ" | "PARSE_ERROR" => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv` (program name first) and checks the polytope source.
pub fn parse_args<I, T>(argv: I) -> CliResult<Command>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let source = match &cli.command {
        Command::Sample(a) => &a.source,
        Command::Center(s) => s,
        Command::TestUniformity(a) => &a.source,
        Command::Bench(a) => &a.source,
    };
    source.resolve()?;
    Ok(cli.command)
}

/// A checked polytope source.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Hypercube(usize),
    Simplex(usize),
    File(PathBuf),
}

impl SourceArgs {
    pub fn resolve(&self) -> CliResult<Source> {
        let usage = |m: &str| Err(CliError::Usage(m.to_string()));
        match (self.figure, &self.input) {
            (Some(Figure::Hypercube | Figure::Simplex), Some(_)) => {
                usage("conflicting polytope sources: use either a generator --figure or --in, not both")
            }
            (Some(Figure::File), None) => usage("--figure file requires --in"),
            (None, None) => usage("a polytope source is required: --figure hypercube|simplex --dim N, or --in PATH"),
            (Some(Figure::File) | None, Some(path)) => {
                if self.dim.is_some() {
                    return usage("--dim applies only to generated figures");
                }
                Ok(Source::File(path.clone()))
            }
            (Some(figure), None) => {
                let Some(n) = self.dim else {
                    return usage("generated figures require --dim");
                };
                Ok(if figure == Figure::Hypercube {
                    Source::Hypercube(n)
                } else {
                    Source::Simplex(n)
                })
            }
        }
    }
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Hypercube(_) => "hypercube".into(),
            Source::Simplex(_) => "simplex".into(),
            Source::File(path) => path.display().to_string(),
        }
    }

    pub fn load(&self) -> CliResult<Polytope> {
        Ok(match self {
            Source::Hypercube(n) => make_hypercube(*n)?,
            Source::Simplex(n) => make_simplex(*n)?,
            Source::File(path) => {
                let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
                let p = Polytope::from_json(&text)?;
                let report = p.validate();
                if !report.ok {
                    let issue = &report.issues[0];
                    return Err(CliError::Core(mhar::Error::InvalidInput(issue.message.clone())));
                }
                p
            }
        })
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn execute(cmd: &Command, out: &mut dyn Write) -> i32 {
    let result = match cmd {
        Command::Sample(a) => cmd_sample(a, out),
        Command::Center(s) => cmd_center(s, out),
        Command::TestUniformity(a) => cmd_test(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point shared by the binary: parse, execute, return the exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    match Cli::try_parse_from(&args) {
        Err(e) if !e.use_stderr() => {
            // --help and --version; a closed pipe is not an error here.
            let _ = write!(std::io::stdout().lock(), "{}", e.render());
            EXIT_OK
        }
        _ => match parse_args(&args) {
            Ok(cmd) => execute(&cmd, &mut std::io::stdout().lock()),
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    format_version: u32,
    polytope: &'a str,
    dim: usize,
    m_in: usize,
    m_eq: usize,
    config: &'a SamplerConfig,
    seed: u64,
    start: &'a [f64],
    samples_written: usize,
    iterate_count: u64,
    burn_in_iterations: u64,
    seconds: f64,
    timing_scope: &'a str,
    degenerate_redraws: u64,
    stats: &'a RunStats,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn cmd_sample(a: &SampleArgs, out: &mut dyn Write) -> CliResult<()> {
    let source = a.source.resolve()?;
    let p = source.load()?;
    let mut cfg = SamplerConfig::defaults_for(&p, a.samples, a.seed);
    if let Some(z) = a.z {
        cfg.z = z;
    }
    if let Some(phi) = a.phi {
        cfg.phi = phi;
    }
    cfg.eps_feas = a.eps;
    cfg.reproject_every = a.reproject_every.unwrap_or(cfg.phi);
    cfg.burn_in = a.burn_in.unwrap_or(cfg.phi);
    cfg.validate()?;

    let center = chebyshev_center(&p)?;
    let set = run_from(&p, &cfg, &center.x)?;
    write_samples(&a.out, &set.samples)?;

    let manifest = Manifest {
        format_version: MANIFEST_FORMAT_VERSION,
        polytope: &source.label(),
        dim: p.dim(),
        m_in: p.m_in(),
        m_eq: p.m_eq(),
        config: &cfg,
        seed: cfg.seed,
        start: &set.start,
        samples_written: set.samples.rows(),
        iterate_count: set.iterate_count,
        burn_in_iterations: set.burn_in_iterations,
        seconds: set.seconds,
        timing_scope: "sampling loop incl. projection build; excludes load and center",
        degenerate_redraws: set.stats.null_direction_redraws + set.stats.chord_redraws,
        stats: &set.stats,
    };
    let path = manifest_path(&a.out);
    let json = serde_json::to_string_pretty(&manifest).expect("plain data serializes");
    fs::write(&path, json + "\n").map_err(|e| io_error(&path, e))?;
    writeln!(out, "wrote {} samples to {}", set.samples.rows(), a.out.display()).map_err(|e| io_error(&a.out, e))?;
    Ok(())
}

/// Header `x1..xn`, one point per row, shortest round-trip decimals.
pub fn write_samples(path: &Path, samples: &Matrix) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let csv_err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let header: Vec<String> = (1..=samples.cols()).map(|i| format!("x{i}")).collect();
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..samples.rows() {
        w.write_record(samples.row(i).iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush().map_err(|e| io_error(path, e))?;
    Ok(())
}

/// Reads a sample CSV written by [`write_samples`].
pub fn read_samples(path: &Path) -> CliResult<Matrix> {
    let parse_err = |m: String| CliError::Core(mhar::Error::Parse(format!("{}: {m}", path.display())));
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let cols = r.headers().map_err(|e| parse_err(e.to_string()))?.len();
    let mut data = Vec::new();
    let mut rows = 0;
    for record in r.records() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        for field in record.iter() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("row {}: not a number: {field:?}", rows + 1)))?;
            data.push(v);
        }
        rows += 1;
    }
    Ok(Matrix::new(rows, cols, data)?)
}

fn cmd_center(s: &SourceArgs, out: &mut dyn Write) -> CliResult<()> {
    let p = s.resolve()?.load()?;
    let c = chebyshev_center(&p)?;
    let coords: Vec<String> = c.x.iter().map(|v| v.to_string()).collect();
    writeln!(out, "r = {}", c.radius).and_then(|_| writeln!(out, "x = {}", coords.join(" ")))
        .map_err(|e| CliError::Io(e.to_string()))
}

fn cmd_test(a: &TestArgs, out: &mut dyn Write) -> CliResult<()> {
    let source = a.source.resolve()?;
    let samples = read_samples(&a.sample_file)?;
    let reference = match &a.reference_file {
        Some(path) => read_samples(path)?,
        None => {
            let count = a.reference_size.unwrap_or(samples.rows());
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            match source {
                Source::Hypercube(n) => sample_uniform_hypercube(&mut rng, n, count),
                Source::Simplex(n) => sample_uniform_simplex(&mut rng, n, count)?,
                Source::File(_) => {
                    return Err(CliError::Usage(
                        "uniform reference points can only be generated for hypercube or simplex; pass --reference-file".into(),
                    ))
                }
            }
        }
    };
    let r = friedman_rafsky(&samples, &reference)?;
    print_test(&r, out).map_err(|e| CliError::Io(e.to_string()))
}

fn print_test(r: &MstTestResult, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "cross_edge_count = {}", r.cross_edge_count)?;
    writeln!(out, "expected_r = {}", r.expected_r)?;
    writeln!(out, "variance_r = {}", r.variance_r)?;
    writeln!(out, "z_value = {}", r.z_value)?;
    writeln!(out, "edge_count = {}", r.edge_count)?;
    writeln!(out, "shared_node_pair_count = {}", r.shared_node_pair_count)?;
    let verdict = if r.passes() { "PASS" } else { "FAIL" };
    writeln!(out, "{verdict} (threshold z >= {Z_THRESHOLD})")
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let source = a.source.resolve()?;
    let p = source.load()?;
    if a.z_list.is_empty() || a.z_list.contains(&0) {
        return Err(CliError::Usage("--z-list needs positive values".into()));
    }
    let phi = a.phi.unwrap_or_else(|| mhar::sampler::default_phi(&p));
    let base = SamplerConfig::new(1, phi, a.windows, a.seed);
    let records = sweep_padding(&source.label(), &p, &a.z_list, &base, a.repetitions)?;
    let json = a.out.as_ref().is_some_and(|o| o.extension().is_some_and(|e| e == "json"));
    let report = if json { report_json(&records) } else { report_csv(&records) };
    match &a.out {
        Some(path) => fs::write(path, &report).map_err(|e| io_error(path, e))?,
        None => out.write_all(report.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(line: &str) -> Vec<String> {
        std::iter::once("mhar").chain(line.split_whitespace()).map(String::from).collect()
    }

    #[test]
    fn sample_command_parses() {
        let cmd = parse_args(argv(
            "sample --figure hypercube --dim 5 --z 100 --phi 125 --samples 10000 --seed 7 --out s.csv",
        ))
        .unwrap();
        let Command::Sample(a) = cmd else { panic!("wrong verb") };
        assert_eq!(a.source.resolve().unwrap(), Source::Hypercube(5));
        assert_eq!((a.z, a.phi, a.samples, a.seed), (Some(100), Some(125), 10000, 7));
        assert_eq!(a.out, PathBuf::from("s.csv"));
    }

    #[test]
    fn center_from_file_parses() {
        let cmd = parse_args(argv("center --in poly.json")).unwrap();
        let Command::Center(s) = cmd else { panic!("wrong verb") };
        assert_eq!(s.resolve().unwrap(), Source::File("poly.json".into()));
        let cmd = parse_args(argv("center --figure file --in poly.json")).unwrap();
        assert!(matches!(cmd, Command::Center(_)));
    }

    #[test]
    fn conflicting_sources_rejected() {
        let err = parse_args(argv("sample --figure hypercube --in poly.json --out s.csv")).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        assert!(err.to_string().contains("conflicting"), "{err}");
    }

    #[test]
    fn usage_errors() {
        for line in [
            "center",
            "center --figure simplex",
            "center --figure file",
            "center --in p.json --dim 3",
            "center --figure hypercube --dim 3 --bogus",
            "sample --figure hypercube --dim 3",
            "frobnicate",
        ] {
            let err = parse_args(argv(line)).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{line}");
        }
    }

    #[test]
    fn z_list_is_comma_separated() {
        let Command::Bench(a) = parse_args(argv("bench --figure hypercube --dim 4 --z-list 1,16,64")).unwrap() else {
            panic!("wrong verb")
        };
        assert_eq!(a.z_list, vec![1, 16, 64]);
        assert_eq!(a.repetitions, 5);
    }

    #[test]
    fn error_codes_map_to_exit_statuses() {
        use mhar::Error;
        assert_eq!(exit_code_for(&Error::EmptyPolytope), EXIT_EMPTY);
        assert_eq!(exit_code_for(&Error::NoInterior { radius: 0.0 }), EXIT_NO_INTERIOR);
        assert_eq!(exit_code_for(&Error::UnboundedProgram), EXIT_UNBOUNDED);
        assert_eq!(exit_code_for(&Error::UnboundedPolytope { walk: 0 }), EXIT_UNBOUNDED);
        assert_eq!(exit_code_for(&Error::CycleSuspected { pivots: 9 }), EXIT_NUMERICAL);
        assert_eq!(exit_code_for(&Error::InvalidInput("x".into())), EXIT_USAGE);
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(manifest_path(Path::new("out/s.csv")), PathBuf::from("out/s.csv.manifest.json"));
    }
}
