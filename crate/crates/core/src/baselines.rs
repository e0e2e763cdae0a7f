//! Truncated power method and truncated Rayleigh flow.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::decomposition::{initial_point, ProblemInstance};
use crate::linalg::{self, dot};
use crate::trace::{Clock, IterationRecord, NoClock, SolveTrace, Termination};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    /// Gradient step of the Rayleigh flow; `None` means `1/(2‖A‖_F)`.
    pub step_size: Option<f64>,
    pub max_iters: usize,
    /// Relative objective change that stops the iteration.
    pub tol: f64,
    /// Unused by the current baselines, kept so configurations round-trip.
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { step_size: None, max_iters: 1000, tol: 1e-8, seed: 0 }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if matches!(self.step_size, Some(eta) if !(eta > 0.0) || !eta.is_finite()) {
            return Err(Error::InvalidConfig("step size must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidConfig(format!("tol = {} must be nonnegative", self.tol)));
        }
        Ok(())
    }
}

/// Keeps the `s` entries of largest magnitude; ties go to the lower index.
pub fn hard_threshold(x: &[f64], s: usize) -> Vec<f64> {
    if s >= x.len() {
        return x.to_vec();
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    let mut out = vec![0.0; x.len()];
    for &i in &order[..s] {
        out[i] = x[i];
    }
    out
}

struct Recorder<'a> {
    problem: &'a ProblemInstance,
    clock: &'a dyn Clock,
    records: Vec<IterationRecord>,
}

impl<'a> Recorder<'a> {
    fn start(problem: &'a ProblemInstance, clock: &'a dyn Clock, x: &[f64], f: f64) -> Self {
        let first = IterationRecord {
            t: 0,
            objective: f,
            relative_decrease: 0.0,
            denominator: problem.c().quad_form(x),
            seconds: clock.seconds(),
            working_set: Vec::new(),
            step_sq: 0.0,
        };
        Recorder { problem, clock, records: vec![first] }
    }

    fn push(&mut self, prev: &[f64], x: &[f64], prev_f: f64, f: f64) -> f64 {
        let decrease = prev_f - f;
        let relative = if prev_f == 0.0 { decrease } else { decrease / prev_f.abs() };
        let step_sq = prev.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        self.records.push(IterationRecord {
            t: self.records.len(),
            objective: f,
            relative_decrease: relative,
            denominator: self.problem.c().quad_form(x),
            seconds: self.clock.seconds(),
            working_set: (0..x.len()).filter(|&i| x[i] != 0.0).collect(),
            step_sq,
        });
        relative
    }

    fn finish(self, x: Vec<f64>, f: f64, termination: Termination) -> SolveTrace {
        SolveTrace { iterations: self.records, x, objective: f, termination }
    }
}

fn ratio(problem: &ProblemInstance, x: &[f64]) -> f64 {
    problem.a().quad_form(x) / problem.c().quad_form(x)
}

fn normalize(x: &mut [f64], norm: f64) {
    x.iter_mut().for_each(|v| *v /= norm);
}

/// Power iteration on `−A + shift·I` with hard thresholding, for `C = I`.
pub fn truncated_power_method(problem: &ProblemInstance, cfg: &BaselineConfig) -> Result<SolveTrace> {
    truncated_power_method_with_clock(problem, cfg, &NoClock)
}

pub fn truncated_power_method_with_clock(
    problem: &ProblemInstance,
    cfg: &BaselineConfig,
    clock: &dyn Clock,
) -> Result<SolveTrace> {
    cfg.validate()?;
    if !problem.c_is_identity() {
        return Err(Error::RequiresIdentityC);
    }
    let n = problem.dim();
    let s = problem.s();
    // −A + shift·I is PSD once shift ≥ λ_max(A)
    let shift = (-linalg::min_eigenvalue(&problem.a().scale(-1.0))?).max(0.0);
    let iteration = problem.a().scale(-1.0).add_scaled_identity(shift);

    let mut x = initial_point(problem);
    let mut f = ratio(problem, &x);
    let mut rec = Recorder::start(problem, clock, &x, f);
    let mut termination = Termination::MaxIterations;
    for _ in 0..cfg.max_iters {
        let mut y = hard_threshold(&iteration.mul_vec(&x), s);
        let norm = linalg::norm2(&y);
        if !(norm > 0.0) {
            termination = Termination::NoDescent;
            break;
        }
        normalize(&mut y, norm);
        debug_assert_eq!(y.len(), n);
        let new_f = ratio(problem, &y);
        if new_f > f + 1e-12 * f.abs().max(1.0) {
            termination = Termination::NoDescent;
            break;
        }
        let rel = rec.push(&x, &y, f, new_f);
        x = y;
        f = new_f;
        if rel.abs() < cfg.tol {
            termination = Termination::Tolerance;
            break;
        }
    }
    Ok(rec.finish(x, f, termination))
}

/// Gradient steps on the generalized Rayleigh quotient, hard thresholded and
/// renormalized to `xᵀCx = 1`. A step that raises the objective is halved up
/// to ten times; if none decreases it, the run stops.
pub fn truncated_rayleigh_flow(problem: &ProblemInstance, cfg: &BaselineConfig) -> Result<SolveTrace> {
    truncated_rayleigh_flow_with_clock(problem, cfg, &NoClock)
}

pub fn truncated_rayleigh_flow_with_clock(
    problem: &ProblemInstance,
    cfg: &BaselineConfig,
    clock: &dyn Clock,
) -> Result<SolveTrace> {
    cfg.validate()?;
    let s = problem.s();
    let eta = match cfg.step_size {
        Some(eta) => eta,
        None => {
            let fro = problem.a().frobenius_norm();
            if fro > 0.0 {
                0.5 / fro
            } else {
                1.0
            }
        }
    };
    let c_norm = |x: &[f64]| libm::sqrt(problem.c().quad_form(x));

    let mut x = initial_point(problem);
    let norm = c_norm(&x);
    normalize(&mut x, norm);
    let mut f = ratio(problem, &x);
    let mut rec = Recorder::start(problem, clock, &x, f);
    let mut termination = Termination::MaxIterations;
    for _ in 0..cfg.max_iters {
        let ax = problem.a().mul_vec(&x);
        let cx = problem.c().mul_vec(&x);
        let xcx = dot(&x, &cx);
        let grad: Vec<f64> = ax.iter().zip(&cx).map(|(a, c)| 2.0 * (a - f * c) / xcx).collect();
        let mut accepted = None;
        let mut step = eta;
        for _ in 0..=10 {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect();
            let mut trial = hard_threshold(&trial, s);
            let norm = c_norm(&trial);
            if norm > 0.0 {
                normalize(&mut trial, norm);
                let trial_f = ratio(problem, &trial);
                if trial_f <= f {
                    accepted = Some((trial, trial_f));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((y, new_f)) = accepted else {
            termination = Termination::NoDescent;
            break;
        };
        let rel = rec.push(&x, &y, f, new_f);
        x = y;
        f = new_f;
        if rel.abs() < cfg.tol {
            termination = Termination::Tolerance;
            break;
        }
    }
    Ok(rec.finish(x, f, termination))
}
