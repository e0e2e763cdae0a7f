//! Problem and solver specifications, their JSON records, and dispatch to the
//! solvers.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sgevp_core::baselines::{truncated_power_method_with_clock, truncated_rayleigh_flow_with_clock};
use sgevp_core::decomposition::SupportEnumeration;
use sgevp_core::qfp::CdOrder;
use sgevp_core::{
    build_cca, build_fda, build_pca, gen_randn, solve_with_clock, BaselineConfig, Clock, Dataset, DecompositionConfig,
    InitRule, Pencil, ProblemInstance, SolveTrace, SubSolver, SwapRule,
};

use crate::error::{CliError, CliResult};
use crate::io::{load_csv, load_libsvm};

/// Seconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct WallClock {
    start: Instant,
}

impl WallClock {
    pub fn start() -> Self {
        WallClock { start: Instant::now() }
    }
}

impl Clock for WallClock {
    fn seconds(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum App {
    Pca,
    Fda,
    Cca,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileFormat {
    Csv,
    Libsvm,
}

/// `ROWSxCOLS`, both positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (r, c) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected ROWSxCOLS, got {s:?}"))?;
        let rows: usize = r.trim().parse().map_err(|_| format!("bad row count {r:?}"))?;
        let cols: usize = c.trim().parse().map_err(|_| format!("bad column count {c:?}"))?;
        if rows == 0 || cols == 0 {
            return Err("rows and columns must be positive".into());
        }
        Ok(Shape { rows, cols })
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum DataSource {
    Randn { rows: usize, cols: usize, seed: u64 },
    File { path: PathBuf, format: FileFormat, labeled: bool, features: Option<usize> },
}

impl DataSource {
    pub fn load(&self) -> CliResult<Dataset> {
        match self {
            DataSource::Randn { rows, cols, seed } => {
                let mut data = gen_randn(*rows, *cols, *seed)?;
                data.name = format!("randn-{rows}x{cols}-seed{seed}");
                Ok(data)
            }
            DataSource::File { path, format: FileFormat::Csv, labeled, .. } => load_csv(path, *labeled),
            DataSource::File { path, format: FileFormat::Libsvm, features, .. } => load_libsvm(path, *features),
        }
    }
}

/// Format implied by the file extension: `.csv` is CSV, anything else LIBSVM.
pub fn infer_format(path: &Path) -> FileFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => FileFormat::Csv,
        _ => FileFormat::Libsvm,
    }
}

/// Where the data comes from and which pencil is built from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub app: App,
    pub ridge: f64,
    #[serde(flatten)]
    pub source: DataSource,
}

impl DatasetRecord {
    pub fn pencil(&self) -> CliResult<Pencil> {
        let data = self.source.load()?;
        let pencil = match self.app {
            App::Pca => build_pca(&data)?,
            App::Fda => build_fda(&data, self.ridge)?,
            App::Cca => {
                // first half of the rows is one view, the rest the other; columns are samples
                if data.rows() < 2 {
                    return Err(CliError::Config("cca needs at least two rows to split into views".into()));
                }
                let half = data.rows() / 2;
                build_cca(&data.slice_rows(0, half)?, &data.slice_rows(half, data.rows())?, self.ridge)?
            }
        };
        Ok(pencil)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Decomposition with bisection subproblems.
    DecB,
    /// Decomposition with coordinate-descent subproblems.
    DecC,
    /// Truncated power method (C = I only).
    Tpm,
    /// Truncated Rayleigh flow.
    Trf,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::DecB => "dec-b",
            SolverKind::DecC => "dec-c",
            SolverKind::Tpm => "tpm",
            SolverKind::Trf => "trf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapRuleArg {
    Combined,
    Exchange,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumerationArg {
    MaxSize,
    AllSizes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CdOrderArg {
    Cyclic,
    Random,
    GaussSouthwell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    DiagonalRatio,
    RandomSparse,
}

/// Every solver parameter, resolved. Decomposition fields are ignored by the
/// baselines and vice versa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub solver: SolverKind,
    pub random: usize,
    pub swap: usize,
    pub theta: f64,
    pub epsilon: f64,
    pub window: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub swap_rule: SwapRuleArg,
    pub enumeration: EnumerationArg,
    pub cd_order: CdOrderArg,
    pub cd_max_sweeps: usize,
    pub init: InitArg,
    pub time_budget: Option<f64>,
    pub step_size: Option<f64>,
    pub tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let dec = DecompositionConfig::default();
        let base = BaselineConfig::default();
        let cd = sgevp_core::qfp::CdOptions::default();
        RunConfig {
            solver: SolverKind::DecB,
            random: dec.random_count,
            swap: dec.swap_count,
            theta: dec.theta,
            epsilon: dec.epsilon,
            window: dec.window,
            max_iters: dec.max_iters,
            seed: dec.seed,
            swap_rule: SwapRuleArg::Combined,
            enumeration: EnumerationArg::MaxSize,
            cd_order: CdOrderArg::Cyclic,
            cd_max_sweeps: cd.max_sweeps,
            init: InitArg::DiagonalRatio,
            time_budget: None,
            step_size: base.step_size,
            tol: base.tol,
        }
    }
}

impl RunConfig {
    pub fn decomposition(&self) -> DecompositionConfig {
        let sub_solver = match self.solver {
            SolverKind::DecC => {
                let order = match self.cd_order {
                    CdOrderArg::Cyclic => CdOrder::Cyclic,
                    CdOrderArg::Random => CdOrder::Random { seed: self.seed },
                    CdOrderArg::GaussSouthwell => CdOrder::GaussSouthwell,
                };
                SubSolver::CoordinateDescent { order, max_sweeps: self.cd_max_sweeps }
            }
            _ => SubSolver::Bisection,
        };
        DecompositionConfig {
            random_count: self.random,
            swap_count: self.swap,
            theta: self.theta,
            sub_solver,
            enumeration: match self.enumeration {
                EnumerationArg::MaxSize => SupportEnumeration::MaxSize,
                EnumerationArg::AllSizes => SupportEnumeration::AllSizes,
            },
            swap_rule: match self.swap_rule {
                SwapRuleArg::Combined => SwapRule::Combined,
                SwapRuleArg::Exchange => SwapRule::Exchange,
                SwapRuleArg::Literal => SwapRule::Literal,
            },
            epsilon: self.epsilon,
            window: self.window,
            max_iters: self.max_iters,
            seed: self.seed,
            init: match self.init {
                InitArg::DiagonalRatio => InitRule::DiagonalRatio,
                InitArg::RandomSparse => InitRule::RandomSparse { seed: self.seed },
            },
            time_budget: self.time_budget,
        }
    }

    pub fn baseline(&self) -> BaselineConfig {
        BaselineConfig { step_size: self.step_size, max_iters: self.max_iters, tol: self.tol, seed: self.seed }
    }

    /// Pairwise swapping without randomness or proximal term performs the
    /// pairwise coordinate optimization of the coordinate-wise algorithm.
    pub fn label(&self) -> Option<&'static str> {
        let dec = matches!(self.solver, SolverKind::DecB | SolverKind::DecC);
        (dec && self.random == 0 && self.swap == 2 && self.theta == 0.0).then_some("CWA-equivalent")
    }

    /// Splits the working-set size between random and swapping coordinates.
    /// Missing parts are derived from `k`; without `k` they default.
    pub fn set_working_set(&mut self, k: Option<usize>, random: Option<usize>, swap: Option<usize>) -> CliResult<()> {
        let defaults = RunConfig::default();
        let (r, w) = match (k, random, swap) {
            (None, r, w) => (r.unwrap_or(defaults.random), w.unwrap_or(defaults.swap)),
            (Some(k), None, None) => {
                let w = k / 4 * 2;
                (k - w, w)
            }
            (Some(k), Some(r), None) => (r, k.checked_sub(r).ok_or_else(|| sum_error(k, r, None))?),
            (Some(k), None, Some(w)) => (k.checked_sub(w).ok_or_else(|| sum_error(k, w, None))?, w),
            (Some(k), Some(r), Some(w)) => {
                if r + w != k {
                    return Err(sum_error(k, r, Some(w)));
                }
                (r, w)
            }
        };
        if w % 2 != 0 {
            return Err(CliError::Config(format!("swap count must be even, got {w}")));
        }
        self.random = r;
        self.swap = w;
        Ok(())
    }
}

fn sum_error(k: usize, a: usize, b: Option<usize>) -> CliError {
    match b {
        Some(b) => CliError::Config(format!("--random {a} plus --swap {b} does not equal --k {k}")),
        None => CliError::Config(format!("working-set part {a} exceeds --k {k}")),
    }
}

/// Runs one solver on `problem`.
pub fn run_solver(problem: &ProblemInstance, config: &RunConfig, clock: &dyn Clock) -> CliResult<SolveTrace> {
    let trace = match config.solver {
        SolverKind::DecB | SolverKind::DecC => solve_with_clock(problem, &config.decomposition(), clock)?,
        SolverKind::Tpm => truncated_power_method_with_clock(problem, &config.baseline(), clock)?,
        SolverKind::Trf => truncated_rayleigh_flow_with_clock(problem, &config.baseline(), clock)?,
    };
    Ok(trace)
}

/// Validates a sparsity level against the problem dimension.
pub fn check_sparsity(s: usize, n: usize) -> CliResult<()> {
    if s == 0 || s > n {
        return Err(CliError::Config(format!("sparsity {s} must lie in 1..={n}")));
    }
    Ok(())
}
