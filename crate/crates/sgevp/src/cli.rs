//! Command-line interface: `gen-data`, `solve`, `bench`, `certify`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use sgevp_core::problems::DEFAULT_RIDGE;
use sgevp_core::{block_k_measure, certify_block2_stationary, gen_randn, Clock, Error as CoreError, NoClock};

use crate::error::{CliError, CliResult};
use crate::io::{dataset_csv, sha256_hex, write_atomic};
use crate::report::{convergence_csv, objective_svg, summary_csv, SummaryRow, TraceDocument};
use crate::run::{
    check_sparsity, infer_format, run_solver, App, CdOrderArg, DataSource, DatasetRecord, EnumerationArg, FileFormat,
    InitArg, RunConfig, Shape, SolverKind, SwapRuleArg, WallClock,
};

#[derive(Debug, Parser)]
#[command(name = "sgevp", version, about = "Sparse generalized eigenvalue problems by block decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a standard Gaussian dataset with random ±1 labels as CSV.
    GenData(GenDataArgs),
    /// Solve one problem and write its JSON trace.
    Solve(SolveArgs),
    /// Run solvers over a list of sparsity levels.
    Bench(BenchArgs),
    /// Check stationarity of a saved solution.
    Certify(CertifyArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub d: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long, value_enum, default_value_t = App::Pca)]
    pub app: App,
    /// Generate `ROWSxCOLS` Gaussian data instead of reading a file.
    #[arg(long, conflicts_with = "data")]
    pub randn: Option<Shape>,
    /// CSV or LIBSVM file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// File format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FileFormat>,
    /// CSV only: the last column holds labels.
    #[arg(long)]
    pub labeled: bool,
    /// LIBSVM only: number of features (default: largest index seen).
    #[arg(long)]
    pub features: Option<usize>,
    /// Relative ridge added to C for fda and cca.
    #[arg(long, default_value_t = DEFAULT_RIDGE)]
    pub ridge: f64,
}

impl DataArgs {
    fn record(&self, seed: u64) -> CliResult<DatasetRecord> {
        let source = match (&self.randn, &self.data) {
            (Some(shape), None) => DataSource::Randn { rows: shape.rows, cols: shape.cols, seed },
            (None, Some(path)) => DataSource::File {
                path: path.clone(),
                format: self.format.unwrap_or_else(|| infer_format(path)),
                labeled: self.labeled,
                features: self.features,
            },
            _ => return Err(CliError::Config("give exactly one of --randn or --data".into())),
        };
        if !self.ridge.is_finite() || self.ridge < 0.0 {
            return Err(CliError::Config(format!("ridge {} must be finite and nonnegative", self.ridge)));
        }
        Ok(DatasetRecord { app: self.app, ridge: self.ridge, source })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClockArg {
    /// Wall-clock seconds.
    Wall,
    /// Record zero seconds everywhere, so outputs are reproducible byte for byte.
    Off,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Seed for the data generator and every random choice of the solvers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Working-set size; split into random and swapping parts.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long)]
    pub swap: Option<usize>,
    #[arg(long, default_value_t = 1e-5)]
    pub theta: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub epsilon: f64,
    /// Window length M of the stopping rule.
    #[arg(long, default_value_t = 50)]
    pub window: usize,
    /// Iteration limit T.
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long)]
    pub time_budget: Option<f64>,
    #[arg(long, value_enum, default_value_t = SwapRuleArg::Combined)]
    pub swap_rule: SwapRuleArg,
    #[arg(long, value_enum, default_value_t = EnumerationArg::MaxSize)]
    pub enumeration: EnumerationArg,
    #[arg(long, value_enum, default_value_t = CdOrderArg::Cyclic)]
    pub cd_order: CdOrderArg,
    #[arg(long, default_value_t = 5000)]
    pub cd_max_sweeps: usize,
    #[arg(long, value_enum, default_value_t = InitArg::DiagonalRatio)]
    pub init: InitArg,
    /// Rayleigh-flow step; default 1/(2‖A‖_F).
    #[arg(long)]
    pub step_size: Option<f64>,
    /// Relative objective change that stops the baselines.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ClockArg::Wall)]
    pub clock: ClockArg,
}

impl SolverArgs {
    fn config(&self, solver: SolverKind) -> CliResult<RunConfig> {
        let mut cfg = RunConfig {
            solver,
            theta: self.theta,
            epsilon: self.epsilon,
            window: self.window,
            max_iters: self.max_iters,
            seed: self.seed,
            swap_rule: self.swap_rule,
            enumeration: self.enumeration,
            cd_order: self.cd_order,
            cd_max_sweeps: self.cd_max_sweeps,
            init: self.init,
            time_budget: self.time_budget,
            step_size: self.step_size,
            tol: self.tol,
            ..RunConfig::default()
        };
        cfg.set_working_set(self.k, self.random, self.swap)?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = SolverKind::DecB)]
    pub solver: SolverKind,
    #[command(flatten)]
    pub params: SolverArgs,
    /// Sparsity level.
    #[arg(long)]
    pub s: Option<usize>,
    /// JSON trace destination.
    #[arg(long, default_value = "trace.json")]
    pub out: PathBuf,
    /// Print the resolved solver configuration as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SolverKind::DecB, SolverKind::Tpm, SolverKind::Trf])]
    pub solvers: Vec<SolverKind>,
    /// Comma-separated sparsity levels.
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 12, 16, 20, 24, 28, 32, 36, 40])]
    pub s_list: Vec<usize>,
    #[command(flatten)]
    pub params: SolverArgs,
    #[arg(long, default_value = "bench_out")]
    pub out: PathBuf,
    /// Also write objective_vs_s.svg.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// JSON trace written by `solve` or `bench`.
    #[arg(long)]
    pub solution: PathBuf,
    /// Block size of the exhaustive stationarity measure.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Proximal weight used inside the measure.
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::GenData(args) => gen_data(&args, out),
        Command::Solve(args) => solve(&args, out),
        Command::Bench(args) => bench(&args, out),
        Command::Certify(args) => certify(&args, out),
    }
}

fn emit(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> CliResult<()> {
    out.write_fmt(text).and_then(|_| out.write_all(b"\n")).map_err(|e| CliError::io("<stdout>", e))
}

fn gen_data(args: &GenDataArgs, out: &mut dyn Write) -> CliResult<()> {
    let data = gen_randn(args.m as usize, args.d as usize, args.seed)?;
    let bytes = dataset_csv(&data);
    write_atomic(&args.out, &bytes)?;
    emit(out, format_args!("wrote {} ({} rows, {} columns)", args.out.display(), data.rows(), data.cols() + 1))?;
    emit(out, format_args!("sha256 {}", sha256_hex(&bytes)))
}

fn clock_for(arg: ClockArg) -> Box<dyn Clock + Send + Sync> {
    match arg {
        ClockArg::Wall => Box::new(WallClock::start()),
        ClockArg::Off => Box::new(NoClock),
    }
}

fn solve(args: &SolveArgs, out: &mut dyn Write) -> CliResult<()> {
    let config = args.params.config(args.solver)?;
    if args.dump_config {
        let text = serde_json::to_string_pretty(&config).expect("configs serialize");
        return emit(out, format_args!("{text}"));
    }
    let s = args.s.ok_or_else(|| CliError::Config("--s is required".into()))?;
    let dataset = args.data.record(args.params.seed)?;
    let pencil = dataset.pencil()?;
    check_sparsity(s, pencil.dim())?;
    let problem = pencil.into_problem(s)?;
    let clock = clock_for(args.params.clock);
    let trace = run_solver(&problem, &config, clock.as_ref())?;
    let seconds = clock.seconds();
    let doc = TraceDocument::new(&config, &dataset, s, &trace);
    write_atomic(&args.out, &doc.to_json())?;
    emit(out, format_args!("solver {}", config.label().unwrap_or(config.solver.name())))?;
    emit(out, format_args!("objective {}", trace.objective))?;
    emit(out, format_args!("iterations {}", trace.iteration_count()))?;
    emit(out, format_args!("termination {}", trace.termination.as_str()))?;
    emit(out, format_args!("seconds {seconds:.3}"))?;
    emit(out, format_args!("trace {}", args.out.display()))
}

/// Worker count from `SGEVP_THREADS`; rayon's default when unset.
fn worker_count() -> CliResult<usize> {
    match std::env::var("SGEVP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!("SGEVP_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(0),
    }
}

/// Summary row, convergence CSV and JSON trace of one bench run.
type RunOutput = (SummaryRow, Vec<u8>, Vec<u8>);

fn bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.solvers.is_empty() || args.s_list.is_empty() {
        return Err(CliError::Config("need at least one solver and one sparsity level".into()));
    }
    let dataset = args.data.record(args.params.seed)?;
    let pencil = dataset.pencil()?;
    for &s in &args.s_list {
        check_sparsity(s, pencil.dim())?;
    }
    let base = pencil.into_problem(args.s_list[0])?;
    let mut jobs = Vec::new();
    for &solver in &args.solvers {
        let config = args.params.config(solver)?;
        for &s in &args.s_list {
            jobs.push((config.clone(), s));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count()?)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<CliResult<RunOutput>> = pool.install(|| {
        jobs.par_iter()
            .map(|(config, s)| {
                let problem = base.with_sparsity(*s)?;
                let clock = clock_for(args.params.clock);
                let trace = run_solver(&problem, config, clock.as_ref())?;
                let row = SummaryRow {
                    solver: config.solver,
                    s: *s,
                    objective: trace.objective,
                    iterations: trace.iteration_count(),
                    seconds: clock.seconds(),
                    termination: trace.termination.as_str(),
                };
                Ok((row, convergence_csv(&trace), TraceDocument::new(config, &dataset, *s, &trace).to_json()))
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(results.len());
    for result in results {
        let (row, csv, json) = result?;
        let stem = format!("trace_{}_{}", row.solver.name(), row.s);
        write_atomic(&args.out.join(format!("{stem}.csv")), &csv)?;
        write_atomic(&args.out.join(format!("{stem}.json")), &json)?;
        emit(
            out,
            format_args!("{:<6} s={:<4} objective {:<24} iterations {:<5} {}", row.solver.name(), row.s, row.objective, row.iterations, row.termination),
        )?;
        rows.push(row);
    }
    write_atomic(&args.out.join("objective_vs_s.csv"), &summary_csv(&rows))?;
    if args.svg {
        let app = serde_json::to_value(dataset.app).expect("apps serialize");
        let title = format!("{} on {}", app.as_str().unwrap_or("problem"), dataset_title(&dataset));
        write_atomic(&args.out.join("objective_vs_s.svg"), objective_svg(&rows, &title).as_bytes())?;
    }
    emit(out, format_args!("wrote {} runs to {}", rows.len(), args.out.display()))
}

fn dataset_title(dataset: &DatasetRecord) -> String {
    match &dataset.source {
        DataSource::Randn { rows, cols, seed } => format!("randn {rows}x{cols} (seed {seed})"),
        DataSource::File { path, .. } => path.display().to_string(),
    }
}

fn certify(args: &CertifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let doc = TraceDocument::read(&args.solution)?;
    let problem = doc.dataset.pencil()?.into_problem(doc.s)?;
    let x = &doc.final_state.x;
    if x.len() != problem.dim() {
        return Err(CliError::Solution(format!("solution has {} entries, problem has {}", x.len(), problem.dim())));
    }
    let objective = sgevp_core::objective(&problem, x)?;
    emit(out, format_args!("objective {objective}"))?;
    let verdict = if certify_block2_stationary(&problem, x, args.tol) { "PASS" } else { "FAIL" };
    emit(out, format_args!("block-2: {verdict}"))?;
    let k = args.k.min(problem.dim());
    match block_k_measure(&problem, x, k, args.theta) {
        Ok(m) => emit(out, format_args!("block-{k} measure: {m:e}")),
        Err(CoreError::TooLarge(count)) => {
            emit(out, format_args!("block-{k} measure: skipped ({count} blocks exceed the enumeration limit)"))
        }
        Err(e) => Err(e.into()),
    }
}
