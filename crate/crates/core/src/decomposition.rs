//! The decomposition driver and its stationarity diagnostics.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};

use crate::frac1d::{solve_1d, OneDimCoefficients};
use crate::linalg::{dot, min_eigenvalue, pd_tol, SymMatrix};
use crate::subproblem::{binomial, build_block_subproblem, combinations, solve_exact};
pub use crate::subproblem::{SubSolver, SupportEnumeration};
use crate::trace::{Clock, IterationRecord, NoClock, SolveTrace, Termination};
use crate::working_set::{select_hybrid, swap_descent_matrix, SwapRule};
use crate::{seeded_rng, Error, Result};

/// Largest working set accepted by [`DecompositionConfig::validate`].
pub const MAX_WORKING_SET: usize = 20;

/// Iterates with `xᵀCx` at or below this are rejected.
pub const DENOMINATOR_FLOOR: f64 = 1e-14;

/// `min xᵀAx / xᵀCx` subject to `‖x‖₀ ≤ s` (and optionally `x ≥ L̂`).
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    a: SymMatrix,
    c: SymMatrix,
    s: usize,
    lower_bound: Option<f64>,
    c_is_identity: bool,
}

impl ProblemInstance {
    pub fn new(a: SymMatrix, c: SymMatrix, s: usize) -> Result<Self> {
        let n = a.dim();
        if c.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.dim() });
        }
        if !a.is_finite() || !c.is_finite() {
            return Err(Error::NonFinite);
        }
        if s == 0 || s > n {
            return Err(Error::InvalidConfig(format!("sparsity s = {s} must lie in 1..={n}")));
        }
        if c.cholesky_min_pivot(pd_tol(&c)).is_none() {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min_eigenvalue(&c)? });
        }
        let c_is_identity = c.is_identity();
        Ok(ProblemInstance { a, c, s, lower_bound: None, c_is_identity })
    }

    /// Adds `x ≥ lower` with `lower ≤ 0`, so the unit vectors stay feasible.
    pub fn with_lower_bound(mut self, lower: f64) -> Result<Self> {
        if !(lower <= 0.0) || !lower.is_finite() {
            return Err(Error::InvalidConfig(format!("lower bound {lower} must be finite and at most zero")));
        }
        self.lower_bound = Some(lower);
        Ok(self)
    }

    /// Same matrices with another sparsity level.
    pub fn with_sparsity(&self, s: usize) -> Result<Self> {
        if s == 0 || s > self.dim() {
            return Err(Error::InvalidConfig(format!("sparsity s = {s} must lie in 1..={}", self.dim())));
        }
        Ok(ProblemInstance { s, ..self.clone() })
    }

    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn c(&self) -> &SymMatrix {
        &self.c
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.lower_bound
    }

    pub fn c_is_identity(&self) -> bool {
        self.c_is_identity
    }
}

/// `xᵀAx / xᵀCx`.
pub fn objective(problem: &ProblemInstance, x: &[f64]) -> Result<f64> {
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch { expected: problem.dim(), found: x.len() });
    }
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0.0).collect();
    if support.is_empty() {
        return Err(Error::ZeroVector);
    }
    Ok(problem.a.quad_form_on(x, &support) / problem.c.quad_form_on(x, &support))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitRule {
    /// `e_i` with `i = argmin A_ii / C_ii`, ties to the lowest index.
    #[default]
    DiagonalRatio,
    /// `s` random coordinates with standard normal values (magnitudes when a
    /// lower bound is set).
    RandomSparse { seed: u64 },
}

/// Starting point according to `rule`.
pub fn initial_point_with(problem: &ProblemInstance, rule: InitRule) -> Vec<f64> {
    let n = problem.dim();
    let mut x = vec![0.0; n];
    match rule {
        InitRule::DiagonalRatio => {
            let ratio = |i: usize| problem.a.get(i, i) / problem.c.get(i, i);
            let mut best = 0;
            for i in 1..n {
                if ratio(i) < ratio(best) {
                    best = i;
                }
            }
            x[best] = 1.0;
        }
        InitRule::RandomSparse { seed } => {
            let mut rng = seeded_rng(seed);
            for i in index::sample(&mut rng, n, problem.s) {
                let mut v: f64 = StandardNormal.sample(&mut rng);
                if problem.lower_bound.is_some() {
                    v = v.abs();
                }
                x[i] = if v == 0.0 { 1.0 } else { v };
            }
        }
    }
    x
}

/// Unit vector of the smallest diagonal ratio.
pub fn initial_point(problem: &ProblemInstance) -> Vec<f64> {
    initial_point_with(problem, InitRule::DiagonalRatio)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionConfig {
    /// Coordinates picked uniformly at random.
    pub random_count: usize,
    /// Coordinates picked by the swapping rule; must be even.
    pub swap_count: usize,
    /// Proximal weight.
    pub theta: f64,
    pub sub_solver: SubSolver,
    pub enumeration: SupportEnumeration,
    pub swap_rule: SwapRule,
    /// Window mean of relative decreases that stops the run.
    pub epsilon: f64,
    /// Window length.
    pub window: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub init: InitRule,
    /// Wall-clock budget in seconds, checked against the supplied clock.
    pub time_budget: Option<f64>,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        DecompositionConfig {
            random_count: 6,
            swap_count: 6,
            theta: 1e-5,
            sub_solver: SubSolver::Bisection,
            enumeration: SupportEnumeration::MaxSize,
            swap_rule: SwapRule::Combined,
            epsilon: 1e-5,
            window: 50,
            max_iters: 1000,
            seed: 0,
            init: InitRule::DiagonalRatio,
            time_budget: None,
        }
    }
}

impl DecompositionConfig {
    pub fn k(&self) -> usize {
        self.random_count + self.swap_count
    }

    pub fn validate(&self, problem: &ProblemInstance) -> Result<()> {
        let n = problem.dim();
        let k = self.k();
        let cap = n.min(MAX_WORKING_SET);
        if k == 0 || k > cap {
            return Err(Error::InvalidK(format!("k = {k} must lie in 1..={cap}")));
        }
        if !self.swap_count.is_multiple_of(2) {
            return Err(Error::InvalidK(format!("swap count {} must be even", self.swap_count)));
        }
        if !(self.theta >= 0.0) || !self.theta.is_finite() {
            return Err(Error::InvalidConfig(format!("theta = {} must be finite and nonnegative", self.theta)));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon = {} must be nonnegative", self.epsilon)));
        }
        if self.window == 0 || self.max_iters == 0 {
            return Err(Error::InvalidConfig("window and iteration limit must be positive".into()));
        }
        if problem.lower_bound.is_some() && self.sub_solver == SubSolver::Bisection {
            return Err(Error::InvalidConfig(
                "bisection handles only unconstrained problems; use coordinate descent with a lower bound".into(),
            ));
        }
        if let SubSolver::CoordinateDescent { max_sweeps: 0, .. } = self.sub_solver {
            return Err(Error::InvalidConfig("coordinate descent needs at least one sweep".into()));
        }
        if matches!(self.time_budget, Some(t) if !(t > 0.0)) {
            return Err(Error::InvalidConfig("time budget must be positive".into()));
        }
        Ok(())
    }
}

/// Runs the decomposition method without timing.
pub fn solve(problem: &ProblemInstance, config: &DecompositionConfig) -> Result<SolveTrace> {
    solve_with_clock(problem, config, &NoClock)
}

/// Runs the decomposition method, stamping records with `clock`.
pub fn solve_with_clock(problem: &ProblemInstance, config: &DecompositionConfig, clock: &dyn Clock) -> Result<SolveTrace> {
    config.validate(problem)?;
    let mut rng = seeded_rng(config.seed);
    let mut x = initial_point_with(problem, config.init);
    let mut denom = problem.c.quad_form(&x);
    let mut f = problem.a.quad_form(&x) / denom;
    let mut records = vec![IterationRecord {
        t: 0,
        objective: f,
        relative_decrease: 0.0,
        denominator: denom,
        seconds: clock.seconds(),
        working_set: Vec::new(),
        step_sq: 0.0,
    }];
    let deterministic_selection = config.random_count == 0;
    let mut window_sum = 0.0;
    let mut window: Vec<f64> = Vec::with_capacity(config.window);
    let mut termination = Termination::MaxIterations;

    for t in 1..=config.max_iters {
        let selection = select_hybrid(problem, &x, config.random_count, config.swap_count, config.swap_rule, &mut rng)?;
        let block = selection.indices();
        let sub = build_block_subproblem(problem, &x, block, config.theta)?;
        let sol = solve_exact(&sub, config.sub_solver, config.enumeration)?;

        let mut candidate = x.clone();
        for (&i, &zi) in block.iter().zip(&sol.z) {
            candidate[i] = zi;
        }
        let step_sq: f64 = block.iter().map(|&i| (candidate[i] - x[i]) * (candidate[i] - x[i])).sum();
        let (new_f, new_denom, step_sq) = if step_sq > 0.0 {
            let cand_denom = problem.c.quad_form(&candidate);
            if !(cand_denom > DENOMINATOR_FLOOR) {
                return Err(Error::DenominatorCollapse(cand_denom));
            }
            let cand_f = problem.a.quad_form(&candidate) / cand_denom;
            // keep the move only if it certifies the proximal decrease
            if cand_f + config.theta * step_sq / cand_denom <= f {
                x = candidate;
                (cand_f, cand_denom, step_sq)
            } else {
                (f, denom, 0.0)
            }
        } else {
            (f, denom, 0.0)
        };

        let decrease = f - new_f;
        let relative = if f == 0.0 { decrease } else { decrease / f.abs() };
        f = new_f;
        denom = new_denom;
        records.push(IterationRecord {
            t,
            objective: f,
            relative_decrease: relative,
            denominator: denom,
            seconds: clock.seconds(),
            working_set: block.to_vec(),
            step_sq,
        });

        if window.len() == config.window {
            window_sum -= window.remove(0);
        }
        window.push(relative.max(0.0));
        window_sum += relative.max(0.0);
        if t >= config.window && window_sum / window.len() as f64 <= config.epsilon {
            termination = Termination::Tolerance;
            break;
        }
        if deterministic_selection && step_sq == 0.0 {
            termination = Termination::FixedPoint;
            break;
        }
        if matches!(config.time_budget, Some(budget) if clock.seconds() >= budget) {
            termination = Termination::TimeBudget;
            break;
        }
    }
    Ok(SolveTrace { iterations: records, x, objective: f, termination })
}

/// Mean of `‖P(B, x) − x_B‖²` over all `C(n, k)` blocks, where `P` solves the
/// block problem with proximal weight `theta0`. Zero exactly at block-`k`
/// optimal points.
pub fn block_k_measure(problem: &ProblemInstance, x: &[f64], k: usize, theta0: f64) -> Result<f64> {
    let n = problem.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidK(format!("k = {k} must lie in 1..={n}")));
    }
    let count = binomial(n, k);
    if count > 1_000_000 {
        return Err(Error::TooLarge(count));
    }
    let solver = if problem.lower_bound.is_some() { SubSolver::coordinate_descent() } else { SubSolver::Bisection };
    let mut total = 0.0;
    for block in combinations(n, k) {
        let sub = build_block_subproblem(problem, x, &block, theta0)?;
        let sol = solve_exact(&sub, solver, SupportEnumeration::MaxSize)?;
        total += block.iter().zip(&sol.z).map(|(&i, zi)| (zi - x[i]) * (zi - x[i])).sum::<f64>();
    }
    Ok(total / count as f64)
}

/// True if no swap pair and no single-coordinate move decreases the
/// objective by more than `tol`.
pub fn certify_block2_stationary(problem: &ProblemInstance, x: &[f64], tol: f64) -> bool {
    certify(problem, x, tol).unwrap_or(false)
}

fn certify(problem: &ProblemInstance, x: &[f64], tol: f64) -> Result<bool> {
    let f = objective(problem, x)?;
    let n = problem.dim();
    let nnz = x.iter().filter(|&&t| t != 0.0).count();
    if nnz > problem.s {
        return Ok(false);
    }
    if nnz < n {
        let pairs = swap_descent_matrix(problem, x, SwapRule::Combined)?;
        if pairs.first().is_some_and(|e| e.descent < -tol) {
            return Ok(false);
        }
    }
    let ax = problem.a.mul_vec(x);
    let cx = problem.c.mul_vec(x);
    let xax = dot(x, &ax);
    let xcx = dot(x, &cx);
    for i in 0..n {
        let on_support = x[i] != 0.0;
        if !on_support && nnz == problem.s {
            continue;
        }
        if on_support && nnz == 1 {
            // the line through x along e_i has a constant ratio
            continue;
        }
        let mut coeffs =
            OneDimCoefficients::new(problem.a.get(i, i), ax[i], 0.5 * xax, problem.c.get(i, i), cx[i], 0.5 * xcx);
        if let Some(l) = problem.lower_bound {
            coeffs = coeffs.with_lower(l - x[i]);
        }
        let best = match solve_1d(&coeffs) {
            Ok(sol) => sol.value,
            Err(Error::UnboundedBelow { infimum }) => infimum,
            Err(e) => return Err(e),
        };
        if best < f - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::qfp::CdOrder;
    use rand::Rng;

    fn random_problem(rng: &mut impl Rng, n: usize, s: usize) -> ProblemInstance {
        let a = SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let x: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = SymMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| x[k * n + i] * x[k * n + j]).sum::<f64>() / n as f64 + if i == j { 0.5 } else { 0.0 }
        });
        ProblemInstance::new(a, c, s).unwrap()
    }

    fn generalized_min(problem: &ProblemInstance) -> f64 {
        let w = linalg::inv_sqrt(problem.c()).unwrap();
        min_eigenvalue(&problem.a().congruence(&w)).unwrap()
    }

    #[test]
    fn objective_cases() {
        let p = ProblemInstance::new(SymMatrix::from_diagonal(&[1.0, 2.0]), SymMatrix::identity(2), 1).unwrap();
        assert_eq!(objective(&p, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(objective(&p, &[0.0, 0.0]), Err(Error::ZeroVector));
        let x = [0.3, -0.7];
        let scaled = [0.9, -2.1];
        assert!((objective(&p, &x).unwrap() - objective(&p, &scaled).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn instance_validation() {
        let i2 = SymMatrix::identity(2);
        assert!(matches!(ProblemInstance::new(i2.clone(), SymMatrix::identity(3), 1), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(ProblemInstance::new(i2.clone(), i2.clone(), 0), Err(Error::InvalidConfig(_))));
        assert!(matches!(ProblemInstance::new(i2.clone(), i2.clone(), 3), Err(Error::InvalidConfig(_))));
        let singular = SymMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(ProblemInstance::new(i2.clone(), singular, 1), Err(Error::NotPositiveDefinite { .. })));
        let p = ProblemInstance::new(i2.clone(), i2, 1).unwrap();
        assert!(p.clone().with_lower_bound(0.5).is_err());
        assert!(p.with_lower_bound(-1.0).is_ok());
    }

    #[test]
    fn initial_point_rule() {
        let p = ProblemInstance::new(SymMatrix::from_diagonal(&[3.0, 1.0, 2.0]), SymMatrix::identity(3), 1).unwrap();
        assert_eq!(initial_point(&p), vec![0.0, 1.0, 0.0]);
        let p = ProblemInstance::new(SymMatrix::identity(3), SymMatrix::from_diagonal(&[1.0, 0.1, 1.0]), 1).unwrap();
        assert_eq!(initial_point(&p), vec![1.0, 0.0, 0.0]);
        let mut rng = seeded_rng(1);
        let p = random_problem(&mut rng, 6, 3);
        let x0 = initial_point(&p);
        let min_ratio = (0..6).map(|i| p.a().get(i, i) / p.c().get(i, i)).fold(f64::INFINITY, f64::min);
        assert_eq!(objective(&p, &x0).unwrap(), min_ratio);
        let xr = initial_point_with(&p, InitRule::RandomSparse { seed: 4 });
        assert_eq!(xr.iter().filter(|&&t| t != 0.0).count(), 3);
    }

    #[test]
    fn config_validation() {
        let p = ProblemInstance::new(SymMatrix::identity(30), SymMatrix::identity(30), 5).unwrap();
        let ok = DecompositionConfig::default();
        assert!(ok.validate(&p).is_ok());
        let odd = DecompositionConfig { random_count: 0, swap_count: 3, ..ok.clone() };
        assert!(matches!(odd.validate(&p), Err(Error::InvalidK(_))));
        let big = DecompositionConfig { random_count: 21, swap_count: 0, ..ok.clone() };
        assert!(matches!(big.validate(&p), Err(Error::InvalidK(_))));
        let neg = DecompositionConfig { theta: -1.0, ..ok.clone() };
        assert!(neg.validate(&p).is_err());
        let bounded = p.with_lower_bound(0.0).unwrap();
        assert!(ok.validate(&bounded).is_err());
        let cd = DecompositionConfig { sub_solver: SubSolver::coordinate_descent(), ..ok };
        assert!(cd.validate(&bounded).is_ok());
    }

    #[test]
    fn one_full_block_finds_the_sparse_optimum() {
        let p = ProblemInstance::new(SymMatrix::from_diagonal(&[5.0, 1.0, 3.0, 2.0]), SymMatrix::identity(4), 2).unwrap();
        let cfg = DecompositionConfig { random_count: 4, swap_count: 0, theta: 0.0, max_iters: 1, ..Default::default() };
        let trace = solve(&p, &cfg).unwrap();
        assert!((trace.objective - 1.0).abs() < 1e-12);
        assert!(trace.x[1] != 0.0);
    }

    #[test]
    fn dense_problem_reaches_generalized_eigenvalue() {
        let mut rng = seeded_rng(2);
        for _ in 0..5 {
            let n = 8;
            let p = random_problem(&mut rng, n, n);
            let cfg = DecompositionConfig { random_count: 4, swap_count: 0, epsilon: 1e-12, ..Default::default() };
            let trace = solve(&p, &cfg).unwrap();
            assert!(trace.objective <= generalized_min(&p) + 1e-6, "{} vs {}", trace.objective, generalized_min(&p));
        }
    }

    #[test]
    fn traces_decrease_sufficiently() {
        let mut rng = seeded_rng(3);
        for (r, w) in [(4, 0), (0, 4), (2, 2)] {
            for seed in 0..4 {
                let p = random_problem(&mut rng, 15, 4);
                let cfg = DecompositionConfig { random_count: r, swap_count: w, theta: 1e-3, seed, ..Default::default() };
                let trace = solve(&p, &cfg).unwrap();
                assert!(trace.is_monotone(1e-12));
                assert_eq!(trace.sufficient_decrease_violation(cfg.theta, 1e-10), None);
                assert!(trace.iterations.iter().all(|r| r.denominator > 0.0));
                assert!(trace.x.iter().filter(|&&t| t != 0.0).count() <= 4);
            }
        }
    }

    #[test]
    fn swapping_runs_end_block2_stationary() {
        let mut rng = seeded_rng(4);
        for _ in 0..5 {
            let p = random_problem(&mut rng, 12, 3);
            let cfg = DecompositionConfig {
                random_count: 0,
                swap_count: 2,
                theta: 1e-8,
                epsilon: 1e-12,
                ..Default::default()
            };
            let trace = solve(&p, &cfg).unwrap();
            assert!(certify_block2_stationary(&p, &trace.x, 1e-6), "{:?}", trace.termination);
        }
    }

    #[test]
    fn random_point_is_not_certified() {
        let mut rng = seeded_rng(5);
        let mut rejected = 0;
        for _ in 0..20 {
            let p = random_problem(&mut rng, 8, 3);
            let x = initial_point_with(&p, InitRule::RandomSparse { seed: rng.random() });
            if !certify_block2_stationary(&p, &x, 1e-8) {
                rejected += 1;
            }
        }
        assert!(rejected >= 18);
    }

    #[test]
    fn block_measure_at_global_optimum() {
        let p = ProblemInstance::new(SymMatrix::from_diagonal(&[5.0, 1.0, 3.0, 2.0]), SymMatrix::identity(4), 2).unwrap();
        let x = [0.0, 1.0, 0.0, 0.0];
        assert!(block_k_measure(&p, &x, 2, 0.0).unwrap() <= 1e-10);
        assert!(block_k_measure(&p, &[1.0, 0.0, 0.0, 0.0], 2, 0.0).unwrap() > 0.0);
        // a single block: the distance to the block solution
        let measure = block_k_measure(&p, &[1.0, 0.0, 0.0, 0.0], 4, 0.0).unwrap();
        assert!((measure - 2.0).abs() < 1e-9, "{measure}");
        let big = ProblemInstance::new(SymMatrix::identity(60), SymMatrix::identity(60), 2).unwrap();
        assert!(matches!(block_k_measure(&big, &initial_point(&big), 10, 0.0), Err(Error::TooLarge(_))));
    }

    #[test]
    fn lower_bound_runs_stay_feasible() {
        let mut rng = seeded_rng(6);
        let p = random_problem(&mut rng, 10, 3).with_lower_bound(0.0).unwrap();
        let cfg = DecompositionConfig {
            random_count: 2,
            swap_count: 2,
            sub_solver: SubSolver::CoordinateDescent { order: CdOrder::Cyclic, max_sweeps: 200 },
            ..Default::default()
        };
        let trace = solve(&p, &cfg).unwrap();
        assert!(trace.x.iter().all(|&t| t >= 0.0));
        assert!(trace.is_monotone(1e-12));
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = seeded_rng(7);
        let p = random_problem(&mut rng, 12, 4);
        let cfg = DecompositionConfig { random_count: 2, swap_count: 2, seed: 11, ..Default::default() };
        assert_eq!(solve(&p, &cfg).unwrap(), solve(&p, &cfg).unwrap());
    }
}
