//! Per-iteration records shared by the decomposition solver and the baselines.

use alloc::vec::Vec;

/// Source of elapsed seconds since the start of a solve.
pub trait Clock {
    fn seconds(&self) -> f64;
}

/// Clock that always reports zero; makes traces reproducible byte for byte.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NoClock;

impl Clock for NoClock {
    fn seconds(&self) -> f64 {
        0.0
    }
}

impl<C: Clock + ?Sized> Clock for &C {
    fn seconds(&self) -> f64 {
        (**self).seconds()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Window mean of relative decreases fell to `ε`.
    Tolerance,
    MaxIterations,
    /// The iterate did not move and the next working set would be the same.
    FixedPoint,
    TimeBudget,
    /// A baseline could not find a decreasing step.
    NoDescent,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Tolerance => "tolerance",
            Termination::MaxIterations => "max_iterations",
            Termination::FixedPoint => "fixed_point",
            Termination::TimeBudget => "time_budget",
            Termination::NoDescent => "no_descent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Iteration counter; record 0 describes the starting point.
    pub t: usize,
    pub objective: f64,
    /// `(f(x^{t-1}) − f(x^t)) / |f(x^{t-1})|`, or the absolute decrease when
    /// the previous objective is exactly zero.
    pub relative_decrease: f64,
    /// `xᵀCx` of the iterate.
    pub denominator: f64,
    pub seconds: f64,
    pub working_set: Vec<usize>,
    /// `‖x^t − x^{t-1}‖²`.
    pub step_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub iterations: Vec<IterationRecord>,
    pub x: Vec<f64>,
    pub objective: f64,
    pub termination: Termination,
}

impl SolveTrace {
    /// Number of iterations performed (the starting record is not counted).
    pub fn iteration_count(&self) -> usize {
        self.iterations.len().saturating_sub(1)
    }

    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.iterations.iter().map(|r| r.objective)
    }

    /// True if no objective exceeds its predecessor by more than `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.iterations.windows(2).all(|w| w[1].objective <= w[0].objective + slack)
    }

    /// First iteration violating
    /// `f(x^{t}) − f(x^{t-1}) ≤ −θ‖x^t − x^{t-1}‖² / (x^tᵀCx^t) + slack`.
    pub fn sufficient_decrease_violation(&self, theta: f64, slack: f64) -> Option<usize> {
        self.iterations.windows(2).find_map(|w| {
            let bound = -theta * w[1].step_sq / w[1].denominator + slack;
            (w[1].objective - w[0].objective > bound).then_some(w[1].t)
        })
    }
}
