//! Seeded Monte Carlo experiments: recovery and decay sweeps over sparsity,
//! plus a RIP probe, with CSV and SVG output.
//!
//! Every trial draws its matrix, signal and noise from seeds that depend only
//! on `(master_seed, experiment, T, trial)`, so results do not change with the
//! worker count or with which other algorithms are configured.

mod config;
mod csv;
mod plot;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

pub use self::config::{AlgorithmSpec, Experiment, ExperimentConfig, EXTERNAL_L1_TAG};
pub use self::csv::{
    parse_records, parse_rip_rows, parse_summaries, read_records, read_summaries, records_to_string,
    rip_rows_to_string, summaries_to_string, write_records, write_rip_rows, write_summaries,
};
pub use self::plot::{emit_plot, render_plot, render_series, Metric, Scale, Series};

use crate::error::{Error, Result};
use crate::linalg::{distance, norm2};
use crate::model::{
    decaying_tail_norm, gen_decaying_signal, gen_gaussian_matrix, gen_sparse_gaussian_signal, measure,
    Signal,
};
use crate::pursuit::{komp, hybrid_omp, omp, truncate_result, PursuitResult};
use crate::rip::{binomial, rip_report_sampled, verify_growth_law, RipMethod};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "SPARSEKIT_WORKERS";

/// Suffix of rows holding a K-fold estimate truncated to its `T` largest entries.
pub const TRUNCATED_SUFFIX: &str = "_trunc";

/// Outcome of one algorithm on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub experiment: Experiment,
    pub algorithm: String,
    pub t: usize,
    pub trial: usize,
    pub seed: u64,
    /// `‖x − x̃‖₂ / ‖x‖₂`.
    pub relative_error: f64,
    pub success: bool,
    /// Seconds spent inside the algorithm call.
    pub runtime: f64,
    pub iterations_run: usize,
    /// `none`, a stop reason tag, or `error:<kind>` when the run failed.
    pub stop_reason: String,
    /// `‖x − x̃‖₂`.
    pub error_l2: f64,
    /// `‖x − x_T‖₂`; zero for exactly sparse signals.
    pub optimal_error: f64,
    /// Residual invariant violations of the run; zero for non-pursuit rows.
    pub invariant_violations: usize,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.stop_reason.starts_with("error:")
    }
}

/// Aggregate over the trials of one `(algorithm, T)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub t: usize,
    pub success_probability: f64,
    pub mean_relative_error: f64,
    pub mean_runtime: f64,
    pub trials: usize,
    pub mean_error_l2: f64,
    pub mean_optimal_error: f64,
}

/// One matrix of the RIP probe.
#[derive(Debug, Clone, PartialEq)]
pub struct RipProbeRow {
    pub trial: usize,
    pub seed: u64,
    pub order: usize,
    pub delta: f64,
    pub method: String,
    pub subsets: u64,
    pub growth_law_holds: bool,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial: a pure function of its coordinates.
pub fn trial_seed(master_seed: u64, experiment: Experiment, t: usize, trial: usize) -> u64 {
    let mut h = splitmix64(master_seed);
    for part in [experiment.id(), t as u64, trial as u64] {
        h = splitmix64(h ^ part);
    }
    h
}

#[derive(Debug, Clone, Copy)]
struct TrialSeeds {
    matrix: u64,
    signal: u64,
    noise: u64,
}

impl TrialSeeds {
    fn derive(seed: u64) -> Self {
        Self {
            matrix: splitmix64(seed ^ 0x6d61_7472_6978),
            signal: splitmix64(seed ^ 0x7369_676e_616c),
            noise: splitmix64(seed ^ 0x6e6f_6973_65),
        }
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidArgument("worker count must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

fn run_algorithm(
    spec: &AlgorithmSpec,
    cfg: &ExperimentConfig,
    phi: &crate::model::MeasurementMatrix,
    y: &[f64],
    t: usize,
) -> Result<PursuitResult> {
    match *spec {
        AlgorithmSpec::Omp => omp(phi, y, t),
        AlgorithmSpec::Komp(k) => komp(phi, y, t, k),
        AlgorithmSpec::Hybrid(alpha) => hybrid_omp(phi, y, t, alpha),
        AlgorithmSpec::Cosamp(_) | AlgorithmSpec::Iht => {
            spec.baseline(cfg).expect("baseline spec").run(phi, y, t)
        }
    }
}

/// Row tags in output order: each algorithm, followed by its truncated
/// variant when `with_truncated` is set and it can over-select.
fn slot_tags(cfg: &ExperimentConfig, with_truncated: bool) -> Vec<String> {
    let mut tags = Vec::new();
    for spec in &cfg.algorithms {
        tags.push(spec.tag());
        if with_truncated && spec.over_selects() {
            tags.push(format!("{}{TRUNCATED_SUFFIX}", spec.tag()));
        }
    }
    tags
}

struct TrialContext<'a> {
    cfg: &'a ExperimentConfig,
    t: usize,
    trial: usize,
    seed: u64,
    optimal_error: f64,
}

impl TrialContext<'_> {
    fn record(&self, algorithm: String, x: &Signal, outcome: Outcome) -> TrialRecord {
        let norm = norm2(x);
        let (error_l2, iterations_run, stop_reason) = match &outcome.estimate {
            Ok(est) => (distance(x, est), outcome.iterations_run, outcome.stop_reason.clone()),
            Err(kind) => (norm, 0, format!("error:{kind}")),
        };
        let relative_error = if norm > 0.0 { error_l2 / norm } else { error_l2 };
        TrialRecord {
            experiment: self.cfg.experiment,
            algorithm,
            t: self.t,
            trial: self.trial,
            seed: self.seed,
            relative_error,
            success: relative_error <= self.cfg.success_tolerance,
            runtime: if self.cfg.record_timing { outcome.runtime } else { 0.0 },
            iterations_run,
            stop_reason,
            error_l2,
            optimal_error: self.optimal_error,
            invariant_violations: outcome.violations,
        }
    }
}

struct Outcome {
    estimate: std::result::Result<Signal, &'static str>,
    runtime: f64,
    iterations_run: usize,
    stop_reason: String,
    violations: usize,
}

/// Runs every configured algorithm on one `(Φ, y)` pair and returns one
/// record per output slot.
fn run_trial(ctx: &TrialContext<'_>, x: &Signal, with_truncated: bool) -> Result<Vec<TrialRecord>> {
    let cfg = ctx.cfg;
    let seeds = TrialSeeds::derive(ctx.seed);
    let phi = gen_gaussian_matrix(cfg.m, cfg.n, seeds.matrix, cfg.column_normalized)?;
    let y = measure(&phi, x, &cfg.noise.with_seed(seeds.noise))?;
    let mut out = Vec::new();
    for spec in &cfg.algorithms {
        let start = Instant::now();
        let result = run_algorithm(spec, cfg, &phi, &y, ctx.t);
        let runtime = start.elapsed().as_secs_f64();
        match result {
            Ok(res) => {
                let violations = if spec.is_pursuit() {
                    res.check_residual_invariants(&phi, &y).total()
                } else {
                    0
                };
                let stop_reason = res.stopped_early.map_or("none", |s| s.tag()).to_string();
                let truncated = (with_truncated && spec.over_selects()).then(|| truncate_result(&res, ctx.t));
                out.push(ctx.record(
                    spec.tag(),
                    x,
                    Outcome {
                        estimate: Ok(res.estimate),
                        runtime,
                        iterations_run: res.iterations_run,
                        stop_reason: stop_reason.clone(),
                        violations,
                    },
                ));
                if let Some(est) = truncated {
                    out.push(ctx.record(
                        format!("{}{TRUNCATED_SUFFIX}", spec.tag()),
                        x,
                        Outcome {
                            estimate: Ok(est),
                            runtime,
                            iterations_run: res.iterations_run,
                            stop_reason,
                            violations: 0,
                        },
                    ));
                }
            }
            Err(e) => {
                log::debug!("{} failed at T={} trial {}: {e}", spec.tag(), ctx.t, ctx.trial);
                let slots = if with_truncated && spec.over_selects() { 2 } else { 1 };
                let tags = [spec.tag(), format!("{}{TRUNCATED_SUFFIX}", spec.tag())];
                for tag in tags.into_iter().take(slots) {
                    out.push(ctx.record(
                        tag,
                        x,
                        Outcome {
                            estimate: Err(e.kind()),
                            runtime,
                            iterations_run: 0,
                            stop_reason: String::new(),
                            violations: 0,
                        },
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Runs all `(T, trial)` work items in parallel and orders the records by
/// `(algorithm, T, trial)`.
fn sweep(
    cfg: &ExperimentConfig,
    with_truncated: bool,
    make_signal: impl Fn(usize, u64) -> Result<(Signal, f64)> + Sync,
) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let items: Vec<(usize, usize)> = cfg
        .t_values
        .iter()
        .flat_map(|&t| (0..cfg.trials).map(move |trial| (t, trial)))
        .collect();
    let per_item: Vec<Vec<TrialRecord>> = items
        .par_iter()
        .map(|&(t, trial)| {
            let seed = trial_seed(cfg.master_seed, cfg.experiment, t, trial);
            let (x, optimal_error) = make_signal(t, TrialSeeds::derive(seed).signal)?;
            let ctx = TrialContext {
                cfg,
                t,
                trial,
                seed,
                optimal_error,
            };
            run_trial(&ctx, &x, with_truncated)
        })
        .collect::<Result<_>>()?;
    let slots = slot_tags(cfg, with_truncated).len();
    let mut records = Vec::with_capacity(per_item.len() * slots);
    for slot in 0..slots {
        records.extend(per_item.iter().map(|item| item[slot].clone()));
    }
    Ok(records)
}

/// Exactly sparse Gaussian signals, noiseless or noisy per the config.
pub fn run_recovery_sweep(cfg: &ExperimentConfig) -> Result<(Vec<TrialRecord>, Vec<SummaryRow>)> {
    let records = sweep(cfg, false, |t, seed| {
        Ok((gen_sparse_gaussian_signal(cfg.n, t, seed)?.0, 0.0))
    })?;
    let summaries = aggregate(&records);
    Ok((records, summaries))
}

/// Signals with magnitudes `0.9ⁿ`; K-fold rows are reported raw and truncated.
pub fn run_decay_sweep(cfg: &ExperimentConfig) -> Result<(Vec<TrialRecord>, Vec<SummaryRow>)> {
    let records = sweep(cfg, true, |t, seed| {
        Ok((gen_decaying_signal(cfg.n, seed)?, decaying_tail_norm(cfg.n, t)))
    })?;
    let summaries = aggregate(&records);
    Ok((records, summaries))
}

/// Sampled RIP lower bounds at each configured order for `trials` Gaussian
/// matrices.
pub fn run_rip_probe(cfg: &ExperimentConfig) -> Result<Vec<RipProbeRow>> {
    cfg.validate()?;
    let per_trial: Vec<Vec<RipProbeRow>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(cfg.master_seed, cfg.experiment, 0, trial);
            let seeds = TrialSeeds::derive(seed);
            let phi = gen_gaussian_matrix(cfg.m, cfg.n, seeds.matrix, cfg.column_normalized)?;
            let report = rip_report_sampled(&phi, &cfg.t_values, cfg.rip_samples, seeds.signal)?;
            let growth = verify_growth_law(&report);
            Ok(report
                .orders
                .iter()
                .enumerate()
                .map(|(i, &order)| RipProbeRow {
                    trial,
                    seed,
                    order,
                    delta: report.deltas[i],
                    method: if report.subsets_evaluated[i] as u128 == binomial(cfg.n, order) {
                        RipMethod::ExactEnumeration.tag().to_string()
                    } else {
                        report.method.tag().to_string()
                    },
                    subsets: report.subsets_evaluated[i],
                    growth_law_holds: growth,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Folds records into one row per `(algorithm, T)`, algorithms in order of
/// first appearance and `T` ascending.
pub fn aggregate(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut order: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<(usize, usize), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        let idx = match order.iter().position(|a| *a == r.algorithm) {
            Some(i) => i,
            None => {
                order.push(&r.algorithm);
                order.len() - 1
            }
        };
        cells.entry((idx, r.t)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((idx, t), rows)| {
            let n = rows.len() as f64;
            let mean = |f: fn(&TrialRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            SummaryRow {
                algorithm: order[idx].to_string(),
                t,
                success_probability: rows.iter().filter(|r| r.success).count() as f64 / n,
                mean_relative_error: mean(|r| r.relative_error),
                mean_runtime: mean(|r| r.runtime),
                trials: rows.len(),
                mean_error_l2: mean(|r| r.error_l2),
                mean_optimal_error: mean(|r| r.optimal_error),
            }
        })
        .collect()
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub records: PathBuf,
    pub summaries: PathBuf,
    pub config: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Writes `<experiment>_trials.csv`, `<experiment>_summary.csv`, the resolved
/// configuration and the default plots into `dir`.
pub fn write_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    records: &[TrialRecord],
    summaries: &[SummaryRow],
) -> Result<OutputFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tag = cfg.experiment.tag();
    let files = OutputFiles {
        records: dir.join(format!("{tag}_trials.csv")),
        summaries: dir.join(format!("{tag}_summary.csv")),
        config: dir.join(format!("{tag}_config.txt")),
        plots: Vec::new(),
    };
    write_records(&files.records, records)?;
    write_summaries(&files.summaries, summaries)?;
    std::fs::write(&files.config, cfg.to_config_string()).map_err(|e| Error::io(&files.config, e))?;
    let metrics: &[Metric] = match cfg.experiment {
        Experiment::RecoverySweep => &[Metric::SuccessProbability, Metric::MeanRuntime],
        _ => &[Metric::MeanErrorL2, Metric::MeanRuntime],
    };
    let mut files = files;
    if !summaries.is_empty() {
        for metric in metrics {
            let path = dir.join(format!("{tag}_{}.svg", metric.tag()));
            emit_plot(summaries, *metric, &path)?;
            files.plots.push(path);
        }
    }
    Ok(files)
}

/// Writes `rip_probe.csv` and the resolved configuration into `dir`.
pub fn write_rip_outputs(dir: &Path, cfg: &ExperimentConfig, rows: &[RipProbeRow]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("rip_probe.csv");
    write_rip_rows(&path, rows)?;
    let config = dir.join("rip_probe_config.txt");
    std::fs::write(&config, cfg.to_config_string()).map_err(|e| Error::io(&config, e))?;
    Ok(path)
}
