//! Benchmark, parameter sweep and timing scans over the synthetic presets.

use std::fmt::Write;
use std::time::Instant;

use isosplit::init::{kmeans_restarts, INIT_MAX_ITER};
use isosplit::metrics::labeling_accuracy;
use isosplit::synth::{generate_dataset, Preset, SimulationSpec};
use isosplit::{isosplit_detailed, DataMatrix, IsosplitParams, Labeling};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// k-means++ restarts for the true-K baseline.
pub const KMEANS_RESTARTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Isosplit,
    KMeans,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Isosplit => "isosplit",
            Algorithm::KMeans => "kmeans++",
        }
    }
}

/// Accuracy and timing of one algorithm over repeated trials.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub simulation: String,
    pub k_true: usize,
    pub algorithm: Algorithm,
    pub accuracies: Vec<f64>,
    pub seconds: Vec<f64>,
    /// Runs stopped by the iteration cap (always 0 for k-means).
    pub capped: usize,
}

impl BenchResult {
    pub fn trials(&self) -> usize {
        self.accuracies.len()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.accuracies)
    }

    /// Sample standard deviation over the square root of the trial count;
    /// `None` for a single trial.
    pub fn std_error(&self) -> Option<f64> {
        std_error(&self.accuracies)
    }

    pub fn mean_seconds(&self) -> f64 {
        mean(&self.seconds)
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn std_error(v: &[f64]) -> Option<f64> {
    let n = v.len();
    if n < 2 {
        return None;
    }
    let m = mean(v);
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    Some((var / n as f64).sqrt())
}

struct Trial {
    iso_accuracy: f64,
    iso_seconds: f64,
    capped: bool,
    km: Option<(f64, f64)>,
}

fn run_trial(
    spec: &SimulationSpec,
    params: &IsosplitParams,
    with_kmeans: bool,
) -> isosplit::Result<Trial> {
    let (data, truth) = generate_dataset(spec)?;
    let params = IsosplitParams {
        seed: spec.seed,
        ..params.clone()
    };
    let start = Instant::now();
    let out = isosplit_detailed(&data, &params)?;
    let iso_seconds = start.elapsed().as_secs_f64();
    let iso_accuracy = labeling_accuracy(&truth, &out.labels)?;
    let km = if with_kmeans {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let start = Instant::now();
        let fit = kmeans_restarts(&data, spec.k, KMEANS_RESTARTS, INIT_MAX_ITER, &mut rng)?;
        let seconds = start.elapsed().as_secs_f64();
        Some((labeling_accuracy(&truth, &fit.labels)?, seconds))
    } else {
        None
    };
    Ok(Trial {
        iso_accuracy,
        iso_seconds,
        capped: out.hit_iteration_cap,
        km,
    })
}

/// Runs `trials` seeded generations of `preset` with `k` clusters; trial `t`
/// uses seed `base_seed + t` for generation and clustering alike. Trials run
/// in parallel.
pub fn run_bench(
    preset: Preset,
    k: usize,
    trials: usize,
    base_seed: u64,
    params: &IsosplitParams,
    with_kmeans: bool,
) -> isosplit::Result<Vec<BenchResult>> {
    let outcomes: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(&preset.spec(k, base_seed + t), params, with_kmeans))
        .collect::<isosplit::Result<_>>()?;
    let mut results = vec![BenchResult {
        simulation: preset.name().to_string(),
        k_true: k,
        algorithm: Algorithm::Isosplit,
        accuracies: outcomes.iter().map(|t| t.iso_accuracy).collect(),
        seconds: outcomes.iter().map(|t| t.iso_seconds).collect(),
        capped: outcomes.iter().filter(|t| t.capped).count(),
    }];
    if with_kmeans {
        results.push(BenchResult {
            simulation: preset.name().to_string(),
            k_true: k,
            algorithm: Algorithm::KMeans,
            accuracies: outcomes
                .iter()
                .map(|t| t.km.expect("k-means ran").0)
                .collect(),
            seconds: outcomes
                .iter()
                .map(|t| t.km.expect("k-means ran").1)
                .collect(),
            capped: 0,
        });
    }
    Ok(results)
}

fn fmt_se(se: Option<f64>) -> String {
    se.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

pub fn bench_csv(results: &[BenchResult]) -> String {
    let mut out =
        String::from("simulation,k_true,algorithm,trials,mean_accuracy,std_error,mean_seconds\n");
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{},{:.6}",
            r.simulation,
            r.k_true,
            r.algorithm.name(),
            r.trials(),
            r.mean(),
            fmt_se(r.std_error()),
            r.mean_seconds()
        );
    }
    out
}

pub fn bench_table(results: &[BenchResult]) -> String {
    let mut out = format!(
        "{:<6} {:>3}  {:<9} {:>6}  {:>16}  {:>9}\n",
        "sim", "K", "algorithm", "trials", "accuracy (%)", "time (s)"
    );
    for r in results {
        let acc = match r.std_error() {
            Some(se) => format!("{:.1} ± {:.1}", 100.0 * r.mean(), 100.0 * se),
            None => format!("{:.1} ± NA", 100.0 * r.mean()),
        };
        let _ = writeln!(
            out,
            "{:<6} {:>3}  {:<9} {:>6}  {:>16}  {:>9.3}",
            r.simulation,
            r.k_true,
            r.algorithm.name(),
            r.trials(),
            acc,
            r.mean_seconds()
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Alpha,
    KInitial,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Alpha => "alpha",
            SweepParameter::KInitial => "k_initial",
        }
    }

    fn apply(self, value: f64, base: &IsosplitParams) -> IsosplitParams {
        match self {
            SweepParameter::Alpha => IsosplitParams {
                alpha: value,
                ..base.clone()
            },
            SweepParameter::KInitial => IsosplitParams {
                k_initial: value as usize,
                ..base.clone()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: BenchResult,
}

/// Reruns the benchmark once per value of `parameter`, on the same seeds.
pub fn run_sweep(
    parameter: SweepParameter,
    values: &[f64],
    preset: Preset,
    k: usize,
    trials: usize,
    base_seed: u64,
    base: &IsosplitParams,
) -> isosplit::Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&value| {
            let params = parameter.apply(value, base);
            let mut results = run_bench(preset, k, trials, base_seed, &params, false)?;
            Ok(SweepRow {
                value,
                result: results.remove(0),
            })
        })
        .collect()
}

pub fn sweep_csv(parameter: SweepParameter, rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{},mean_accuracy,std_error,mean_seconds\n",
        parameter.name()
    );
    for row in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{},{:.6}",
            row.value,
            row.result.mean(),
            fmt_se(row.result.std_error()),
            row.result.mean_seconds()
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingAxis {
    N,
    K,
    P,
}

impl TimingAxis {
    pub fn name(self) -> &'static str {
        match self {
            TimingAxis::N => "n",
            TimingAxis::K => "k",
            TimingAxis::P => "p",
        }
    }

    /// `(n, K, p)` for one scan value. Unscanned quantities stay at n = 1000,
    /// K = 6, p = 2.
    pub fn config(self, value: usize) -> (usize, usize, usize) {
        match self {
            TimingAxis::N => (value, 6, 2),
            TimingAxis::K => (1000, value, 2),
            TimingAxis::P => (1000, 6, value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub value: usize,
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub seconds: Vec<f64>,
}

/// Isotropic well-separated clusters in two dimensions with `n / k` points
/// each, padded with standard normal noise coordinates up to `p` dimensions.
pub fn timing_dataset(
    n: usize,
    k: usize,
    p: usize,
    seed: u64,
) -> isosplit::Result<(DataMatrix, Labeling)> {
    let spec = SimulationSpec {
        pop_fixed: Some((n / k).max(1)),
        ..Preset::Sim1.spec(k, seed)
    };
    let (base, labels) = generate_dataset(&spec)?;
    if p <= base.p() {
        return Ok((base, labels));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let extra = base.map_rows(p, |row, out| {
        out[..row.len()].copy_from_slice(row);
        for v in &mut out[row.len()..] {
            *v = rng.sample(StandardNormal);
        }
    })?;
    Ok((extra, labels))
}

/// Mean clustering time per scan value over `repeats` sequential runs.
pub fn run_timing(
    axis: TimingAxis,
    values: &[usize],
    repeats: usize,
    base_seed: u64,
    params: &IsosplitParams,
) -> isosplit::Result<Vec<TimingRow>> {
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let (n, k, p) = axis.config(value);
        let mut seconds = Vec::with_capacity(repeats);
        for r in 0..repeats as u64 {
            let seed = base_seed + r;
            let (data, _) = timing_dataset(n, k, p, seed)?;
            let params = IsosplitParams {
                seed,
                ..params.clone()
            };
            let start = Instant::now();
            isosplit_detailed(&data, &params)?;
            seconds.push(start.elapsed().as_secs_f64());
        }
        rows.push(TimingRow {
            value,
            n: (n / k).max(1) * k,
            k,
            p,
            seconds,
        });
    }
    Ok(rows)
}

pub fn timing_csv(axis: TimingAxis, rows: &[TimingRow]) -> String {
    let mut out = format!("{},n,k,p,repeats,mean_seconds,std_error\n", axis.name());
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6},{}",
            row.value,
            row.n,
            row.k,
            row.p,
            row.seconds.len(),
            mean(&row.seconds),
            fmt_se(std_error(&row.seconds))
        );
    }
    out
}
