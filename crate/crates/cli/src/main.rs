use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sparsekit::baselines::{BaselineConfig, CosampConfig, IhtConfig};
use sparsekit::bench::{self, AlgorithmSpec, Experiment, ExperimentConfig, Metric, Scale, Series, WORKERS_ENV};
use sparsekit::bounds::{compare_omp_komp_with, BoundTable, CrossoverRule, DeltaModel};
use sparsekit::model::{format_real, read_matrix_csv, read_vector_csv, write_vector_csv};
use sparsekit::rip::{rip_report_exact, rip_report_sampled, RipReport, DEFAULT_ENUMERATION_BUDGET};
use sparsekit::{Error, MeasurementMatrix, Result};

#[derive(Parser)]
#[command(name = "sparsekit", version, about = "Greedy sparse recovery, RIP certification and benchmarks")]
struct Cli {
    /// Worker threads for parallel work.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover a signal from one matrix and one measurement vector.
    Recover {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        measurements: PathBuf,
        /// Sparsity level T (iterations for the pursuit family).
        #[arg(long)]
        sparsity: usize,
        /// omp, komp:K, hybrid:ALPHA, cosamp:t, cosamp:2t or iht.
        #[arg(long, default_value = "omp")]
        algorithm: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Restricted isometry constants of a matrix.
    Rip {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        order: usize,
        /// Enumerate every subset.
        #[arg(long, conflicts_with = "samples")]
        exact: bool,
        /// Random subsets per order; gives a lower bound.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report every order from 1 to `--order`.
        #[arg(long)]
        all_orders: bool,
        /// Largest subset count exact enumeration may visit.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the OMP and K-fold OMP error-bound constants.
    Bounds {
        #[arg(long, value_enum, default_value_t = ModelKind::PowerLaw)]
        model: ModelKind,
        #[arg(long)]
        delta2: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// CSV from `rip` (order, delta, ...) for `--model table`.
        #[arg(long)]
        deltas: Option<PathBuf>,
        #[arg(long = "T", visible_alias = "t")]
        t: usize,
        #[arg(long, default_value_t = 20)]
        kmax: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::DoubledPlusTwo)]
        rule: RuleArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a benchmark experiment.
    Bench {
        #[arg(value_enum)]
        kind: BenchKind,
        /// Flat key = value file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plot one metric of a summary CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        metric: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    #[value(name = "power_law")]
    PowerLaw,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    /// 2·C_K + 2 < C_1
    #[value(name = "2ck_plus_2")]
    DoubledPlusTwo,
    /// 2·C_K < C_1
    #[value(name = "2ck")]
    DoubledConstant,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchKind {
    Recovery,
    Decay,
    Rip,
}

impl BenchKind {
    fn experiment(self) -> Experiment {
        match self {
            BenchKind::Recovery => Experiment::RecoverySweep,
            BenchKind::Decay => Experiment::DecaySweep,
            BenchKind::Rip => Experiment::RipProbe,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let workers = cli.workers;
    match bench::with_workers(workers, || run(cli.command)).and_then(|r| r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error kind={}: {e}", e.kind());
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Recover {
            matrix,
            measurements,
            sparsity,
            algorithm,
            out,
        } => recover(&matrix, &measurements, sparsity, &algorithm, &out),
        Command::Rip {
            matrix,
            order,
            exact,
            samples,
            seed,
            all_orders,
            budget,
            out,
        } => {
            let phi = MeasurementMatrix::from_matrix(read_matrix_csv(&matrix)?);
            let orders: Vec<usize> = if all_orders { (1..=order).collect() } else { vec![order] };
            let report = match samples {
                Some(n) if !exact => rip_report_sampled(&phi, &orders, n, seed)?,
                _ => rip_report_exact(&phi, &orders, budget)?,
            };
            emit(out.as_deref(), &rip_csv(&report))
        }
        Command::Bounds {
            model,
            delta2,
            beta,
            deltas,
            t,
            kmax,
            rule,
            out,
            svg,
        } => {
            let model = match model {
                ModelKind::PowerLaw => {
                    let need = |v: Option<f64>, name: &str| {
                        v.ok_or_else(|| Error::InvalidArgument(format!("--{name} is required for power_law")))
                    };
                    DeltaModel::power_law(need(delta2, "delta2")?, need(beta, "beta")?)?
                }
                ModelKind::Table => {
                    let path = deltas
                        .ok_or_else(|| Error::InvalidArgument("--deltas is required for table".into()))?;
                    read_delta_table(&path)?
                }
            };
            let rule = match rule {
                RuleArg::DoubledPlusTwo => CrossoverRule::DoubledPlusTwo,
                RuleArg::DoubledConstant => CrossoverRule::DoubledConstant,
            };
            let table = compare_omp_komp_with(&model, t, 1..=kmax, rule);
            match table.first_crossover() {
                Some(k) => eprintln!("first crossover at K={k}"),
                None => eprintln!("no crossover for K <= {kmax}"),
            }
            if let Some(path) = svg {
                write_file(&path, &bounds_svg(&table)?)?;
            }
            emit(out.as_deref(), &bounds_csv(&table))
        }
        Command::Bench { kind, config, out } => {
            let cfg = match config {
                Some(path) => ExperimentConfig::load(&path)?,
                None => ExperimentConfig::default_for(kind.experiment()),
            };
            if cfg.experiment != kind.experiment() {
                return Err(Error::InvalidArgument(format!(
                    "config describes {} but {} was requested",
                    cfg.experiment,
                    kind.experiment()
                )));
            }
            if cfg.experiment == Experiment::RipProbe {
                let rows = bench::run_rip_probe(&cfg)?;
                let path = bench::write_rip_outputs(&out, &cfg, &rows)?;
                println!("{}", path.display());
                return Ok(());
            }
            let (records, summaries) = match cfg.experiment {
                Experiment::RecoverySweep => bench::run_recovery_sweep(&cfg)?,
                _ => bench::run_decay_sweep(&cfg)?,
            };
            let files = bench::write_outputs(&out, &cfg, &records, &summaries)?;
            let violations: usize = records.iter().map(|r| r.invariant_violations).sum();
            eprintln!("{} records, {} invariant violations", records.len(), violations);
            for path in [&files.records, &files.summaries, &files.config].into_iter().chain(&files.plots) {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Plot { csv, metric, out } => {
            let metric: Metric = metric.parse()?;
            let summaries = bench::read_summaries(&csv)?;
            bench::emit_plot(&summaries, metric, &out)
        }
    }
}

fn recover(matrix: &Path, measurements: &Path, t: usize, algorithm: &str, out: &Path) -> Result<()> {
    let phi = MeasurementMatrix::from_matrix(read_matrix_csv(matrix)?);
    let y = read_vector_csv(measurements)?;
    let spec: AlgorithmSpec = algorithm.parse()?;
    let result = match spec {
        AlgorithmSpec::Omp => sparsekit::omp(&phi, &y, t)?,
        AlgorithmSpec::Komp(k) => sparsekit::komp(&phi, &y, t, k)?,
        AlgorithmSpec::Hybrid(a) => sparsekit::hybrid_omp(&phi, &y, t, a)?,
        AlgorithmSpec::Cosamp(width) => BaselineConfig::Cosamp(CosampConfig {
            width,
            ..CosampConfig::default()
        })
        .run(&phi, &y, t)?,
        AlgorithmSpec::Iht => BaselineConfig::Iht(IhtConfig::default()).run(&phi, &y, t)?,
    };
    write_vector_csv(out, &result.estimate)?;
    eprintln!(
        "{}: {} iterations, residual {}, stop {}",
        spec.tag(),
        result.iterations_run,
        format_real(result.residual_norm_history.last().copied().unwrap_or(0.0)),
        result.stopped_early.map_or("none", |s| s.tag())
    );
    Ok(())
}

fn rip_csv(report: &RipReport) -> String {
    let mut s = String::from("order,delta,method,subsets\n");
    for (i, order) in report.orders.iter().enumerate() {
        s.push_str(&format!(
            "{order},{},{},{}\n",
            format_real(report.deltas[i]),
            report.method.tag(),
            report.subsets_evaluated[i]
        ));
    }
    s
}

fn read_delta_table(path: &Path) -> Result<DeltaModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let bad = |line: usize, msg: &str| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {msg}"),
    };
    let mut table = std::collections::BTreeMap::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let order = fields.next().and_then(|f| f.trim().parse::<usize>().ok());
        let delta = fields.next().and_then(|f| f.trim().parse::<f64>().ok());
        match (order, delta) {
            (Some(o), Some(d)) => {
                table.insert(o, d);
            }
            _ => return Err(bad(i + 1, "expected order,delta")),
        }
    }
    Ok(DeltaModel::Table(table))
}

fn bounds_csv(table: &BoundTable) -> String {
    let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
    let mut s = format!("k,c_k,{},crossover,defined\n", table.rule.tag());
    for row in &table.rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            row.k,
            opt(row.ck),
            opt(row.comparison),
            row.crossover,
            row.defined
        ));
    }
    s
}

fn bounds_svg(table: &BoundTable) -> Result<String> {
    let points: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.k > 1)
        .filter_map(|r| r.comparison.map(|c| (r.k as f64, c)))
        .collect();
    let mut series = vec![Series {
        label: table.rule.tag().replace("ck", "C_K").replace("_plus_", " + "),
        points,
        dashed: false,
    }];
    if let (Some(c1), Some(first), Some(last)) = (table.c1, table.rows.first(), table.rows.last()) {
        series.push(Series {
            label: format!("C_1({})", table.t),
            points: vec![(first.k as f64, c1), (last.k as f64, c1)],
            dashed: true,
        });
    }
    bench::render_series(&series, "K", "bound constant", Scale::Linear)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}
