//! Argument definitions and subcommand dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use isosplit::synth::{generate_dataset, Preset, SimulationSpec};
use isosplit::{isosplit_detailed, IsosplitParams};

use crate::bench::{self, SweepParameter, TimingAxis};
use crate::error::{CliError, CliResult};
use crate::io;
use crate::plot;

/// Environment variable consulted for the seed when no `--seed` flag is given.
pub const SEED_ENV: &str = "ISOSPLIT_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "isosplit",
    version,
    about = "Unimodal clustering and synthetic benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster the rows of a CSV file and write one label per row.
    Cluster(ClusterArgs),
    /// Generate a synthetic data set and its true labels.
    Simulate(SimulateArgs),
    /// Compare isosplit with true-K k-means++ over seeded simulations.
    Bench(BenchArgs),
    /// Rerun a simulation over a range of one parameter.
    Sweep(SweepArgs),
    /// Measure clustering time as n, K or p grows.
    Timing(TimingArgs),
}

#[derive(Debug, Args)]
pub struct AlgorithmArgs {
    /// Rejection constant of the unimodality test.
    #[arg(long, default_value_t = 1.2, value_parser = positive_f64)]
    pub alpha: f64,
    /// Size of the initial over-segmentation.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_initial: u64,
    /// Project on the raw centroid difference instead of the whitened one.
    #[arg(long)]
    pub no_whiten: bool,
}

impl AlgorithmArgs {
    fn params(&self, seed: u64) -> IsosplitParams {
        IsosplitParams {
            alpha: self.alpha,
            k_initial: self.k_initial as usize,
            whiten: !self.no_whiten,
            seed,
            ..IsosplitParams::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Label file, one label per input row.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write an SVG scatter of the first two coordinates.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub algorithm: AlgorithmArgs,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["preset", "spec"])))]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Number of clusters for `--preset`.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON simulation spec, used instead of a preset.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Output CSV of points.
    #[arg(long)]
    pub data: PathBuf,
    /// Output file of true labels.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_preset,
          default_value = "sim1,sim2,sim3,sim4,sim5")]
    pub preset: Vec<Preset>,
    #[arg(long, value_delimiter = ',', default_value = "3,6,12",
          value_parser = clap::value_parser!(u64).range(1..))]
    pub k: Vec<u64>,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Base seed; trial `t` uses `seed + t`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip the k-means++ baseline.
    #[arg(long)]
    pub no_kmeans: bool,
    /// CSV results file.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Aligned text table file (the table is always printed).
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub algorithm: AlgorithmArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepChoice {
    Alpha,
    KInitial,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub parameter: SweepChoice,
    /// Values to try; defaults to 0.9..=2.3 for alpha and 3,6,...,96 for k-initial.
    #[arg(long, value_delimiter = ',', value_parser = positive_f64)]
    pub values: Vec<f64>,
    #[arg(long, value_parser = parse_preset, default_value = "sim2")]
    pub preset: Preset,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisChoice {
    N,
    K,
    P,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    #[arg(long, value_enum)]
    pub axis: AxisChoice,
    /// Increasing scan values; defaults depend on the axis.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..))]
    pub values: Vec<u64>,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be a positive number, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: isosplit::Error| e.to_string())
}

/// Flag value, else the environment default, else 0.
fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not a valid seed"))),
        Err(_) => Ok(0),
    }
}

/// Parses `args` (including the program name) and runs the command, returning
/// the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Cluster(args) => cluster(args),
        Command::Simulate(args) => simulate(args),
        Command::Bench(args) => bench_cmd(args),
        Command::Sweep(args) => sweep(args),
        Command::Timing(args) => timing(args),
    }
}

fn cluster(args: ClusterArgs) -> CliResult<()> {
    let seed = resolve_seed(args.seed)?;
    let data = io::read_matrix(&args.input)?;
    let out = isosplit_detailed(&data, &args.algorithm.params(seed))?;
    io::write_labels(&args.output, &out.labels)?;
    if let Some(path) = &args.plot {
        io::write_text(path, &plot::scatter_svg(&data, &out.labels))?;
    }
    println!("{} clusters", out.labels.num_clusters());
    Ok(())
}

fn simulate(args: SimulateArgs) -> CliResult<()> {
    let spec = match (&args.spec, args.preset) {
        (Some(path), _) => {
            let mut spec = read_spec(path)?;
            if let Some(seed) = args.seed {
                spec.seed = seed;
            }
            spec
        }
        (None, Some(preset)) => preset.spec(args.k as usize, resolve_seed(args.seed)?),
        (None, None) => {
            return Err(CliError::Usage(
                "either --preset or --spec is required".into(),
            ))
        }
    };
    let (data, labels) = generate_dataset(&spec)?;
    io::write_matrix(&args.data, &data)?;
    io::write_labels(&args.labels, &labels)?;
    if let Some(path) = &args.plot {
        io::write_text(path, &plot::scatter_svg(&data, &labels))?;
    }
    Ok(())
}

fn read_spec(path: &Path) -> CliResult<SimulationSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let spec: SimulationSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    spec.validate()
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(spec)
}

fn bench_cmd(args: BenchArgs) -> CliResult<()> {
    let seed = resolve_seed(args.seed)?;
    let params = args.algorithm.params(seed);
    let mut results = Vec::new();
    for &preset in &args.preset {
        for &k in &args.k {
            results.extend(bench::run_bench(
                preset,
                k as usize,
                args.trials as usize,
                seed,
                &params,
                !args.no_kmeans,
            )?);
        }
    }
    let table = bench::bench_table(&results);
    print!("{table}");
    if let Some(path) = &args.output {
        io::write_text(path, &bench::bench_csv(&results))?;
    }
    if let Some(path) = &args.table {
        io::write_text(path, &table)?;
    }
    Ok(())
}

/// Default sweep values: alpha 0.9 to 2.3 in steps of 0.1, or doubling k-initial.
pub fn default_sweep_values(parameter: SweepParameter) -> Vec<f64> {
    match parameter {
        SweepParameter::Alpha => (9..=23).map(|i| i as f64 / 10.0).collect(),
        SweepParameter::KInitial => vec![3.0, 6.0, 12.0, 24.0, 48.0, 96.0],
    }
}

fn sweep(args: SweepArgs) -> CliResult<()> {
    let parameter = match args.parameter {
        SweepChoice::Alpha => SweepParameter::Alpha,
        SweepChoice::KInitial => SweepParameter::KInitial,
    };
    let values = if args.values.is_empty() {
        default_sweep_values(parameter)
    } else {
        args.values
    };
    if parameter == SweepParameter::KInitial && values.iter().any(|v| v.fract() != 0.0) {
        return Err(CliError::Usage(
            "k-initial values must be whole numbers".into(),
        ));
    }
    let seed = resolve_seed(args.seed)?;
    let rows = bench::run_sweep(
        parameter,
        &values,
        args.preset,
        args.k as usize,
        args.trials as usize,
        seed,
        &IsosplitParams::default(),
    )?;
    let csv = bench::sweep_csv(parameter, &rows);
    print!("{csv}");
    if let Some(path) = &args.output {
        io::write_text(path, &csv)?;
    }
    Ok(())
}

pub fn default_timing_values(axis: TimingAxis) -> Vec<usize> {
    match axis {
        TimingAxis::N => vec![1000, 2000, 4000, 8000],
        TimingAxis::K => vec![2, 4, 6, 8, 12, 16],
        TimingAxis::P => vec![2, 4, 6, 8, 12, 16],
    }
}

fn timing(args: TimingArgs) -> CliResult<()> {
    let axis = match args.axis {
        AxisChoice::N => TimingAxis::N,
        AxisChoice::K => TimingAxis::K,
        AxisChoice::P => TimingAxis::P,
    };
    let values: Vec<usize> = if args.values.is_empty() {
        default_timing_values(axis)
    } else {
        args.values.iter().map(|&v| v as usize).collect()
    };
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(
            "timing values must be strictly increasing".into(),
        ));
    }
    let seed = resolve_seed(args.seed)?;
    let rows = bench::run_timing(
        axis,
        &values,
        args.repeats as usize,
        seed,
        &IsosplitParams::default(),
    )?;
    let csv = bench::timing_csv(axis, &rows);
    print!("{csv}");
    if let Some(path) = &args.output {
        io::write_text(path, &csv)?;
    }
    Ok(())
}
