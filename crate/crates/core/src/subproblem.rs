//! The sparsity-constrained block subproblem: with `x_N` fixed, minimize
//! the proximal ratio over `z = x_B` subject to `‖z‖₀ ≤ s − ‖x_N‖₀`.
//!
//! Restricted value is monotone in the support (a larger support can always
//! pin extra coordinates at zero), so only supports of size `min(q, k)` need
//! to be enumerated.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::decomposition::ProblemInstance;
use crate::linalg::{self, SymMatrix};
use crate::qfp::{self, CdOptions, CdOrder, QfpSolution, QfpSubproblem};
use crate::{Error, Result};

/// Per-support solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubSolver {
    /// Global solve by bisection on the parametric function.
    Bisection,
    /// Exact coordinate descent; required when a lower bound is present.
    CoordinateDescent { order: CdOrder, max_sweeps: usize },
}

impl SubSolver {
    pub fn coordinate_descent() -> Self {
        let d = CdOptions::default();
        SubSolver::CoordinateDescent { order: d.order, max_sweeps: d.max_sweeps }
    }
}

/// Which supports are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SupportEnumeration {
    /// Only supports of size `min(q, k)`.
    #[default]
    MaxSize,
    /// Every support of size `0..=min(q, k)`.
    AllSizes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSubproblem {
    qfp: QfpSubproblem,
    budget: usize,
}

impl BlockSubproblem {
    pub fn qfp(&self) -> &QfpSubproblem {
        &self.qfp
    }

    /// `q = s − ‖x_N‖₀`.
    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn dim(&self) -> usize {
        self.qfp.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSolution {
    /// Block variables; off-support entries are exactly zero.
    pub z: Vec<f64>,
    pub value: f64,
    /// Positions within the block carrying the optimal support.
    pub support: Vec<usize>,
}

/// Coefficients of the block problem for working set `block` at `x`.
pub fn build_block_subproblem(
    problem: &ProblemInstance,
    x: &[f64],
    block: &[usize],
    theta: f64,
) -> Result<BlockSubproblem> {
    let n = problem.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    linalg::check_indices(block, n)?;
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::InvalidConfig(format!("theta = {theta} must be finite and nonnegative")));
    }
    let mut in_block = vec![false; n];
    block.iter().for_each(|&i| in_block[i] = true);
    let rest: Vec<usize> = (0..n).filter(|&i| !in_block[i] && x[i] != 0.0).collect();
    let nnz_rest = rest.len();
    let nnz_total = nnz_rest + block.iter().filter(|&&i| x[i] != 0.0).count();
    if nnz_total > problem.s() {
        return Err(Error::InvalidConfig(format!(
            "iterate has {nnz_total} nonzeros, above the budget {}",
            problem.s()
        )));
    }

    let a = problem.a();
    let c = problem.c();
    let x_block: Vec<f64> = block.iter().map(|&i| x[i]).collect();
    let q = a.submatrix_unchecked(block).add_scaled_identity(theta);
    let r = c.submatrix_unchecked(block);
    let cross = |m: &SymMatrix, i: usize| rest.iter().map(|&j| m.get(i, j) * x[j]).sum::<f64>();
    let p: Vec<f64> = block.iter().zip(&x_block).map(|(&i, &xi)| cross(a, i) - theta * xi).collect();
    let cv: Vec<f64> = block.iter().map(|&i| cross(c, i)).collect();
    let w = 0.5 * a.quad_form_on(x, &rest) + 0.5 * theta * linalg::dot(&x_block, &x_block);
    let v = 0.5 * c.quad_form_on(x, &rest);

    let mut qfp = QfpSubproblem::new(q, p, w, r, cv, v)?.with_anchor(x_block);
    if let Some(l) = problem.lower_bound() {
        qfp = qfp.with_lower_bound(l);
    }
    Ok(BlockSubproblem { qfp, budget: problem.s() - nnz_rest })
}

/// Lexicographic `size`-subsets of `0..k`.
struct Combinations {
    k: usize,
    current: Vec<usize>,
    first: bool,
}

impl Combinations {
    fn new(k: usize, size: usize) -> Self {
        Combinations { k, current: (0..size).collect(), first: true }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let size = self.current.len();
        if self.first {
            self.first = false;
            return (size <= self.k).then(|| self.current.clone());
        }
        let mut i = size;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.k - size + i {
                self.current[i] += 1;
                for j in i + 1..size {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(self.current.clone());
            }
        }
        None
    }
}

pub(crate) fn combinations(k: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    Combinations::new(k, size)
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn solve_support(sub: &QfpSubproblem, solver: SubSolver) -> Result<QfpSolution> {
    match solver {
        SubSolver::Bisection => qfp::solve_bisection(sub, None),
        SubSolver::CoordinateDescent { order, max_sweeps } => {
            let start = cd_start(sub)?;
            let opts = CdOptions { order, max_sweeps, ..CdOptions::default() };
            qfp::solve_coordinate_descent(sub, start, &opts)
        }
    }
}

/// Best of the origin and the anchor (the current block values), falling
/// back to the unit vector of the smallest diagonal ratio.
fn cd_start(sub: &QfpSubproblem) -> Result<Vec<f64>> {
    let m = sub.dim();
    let mut candidates = vec![qfp::default_start(sub)];
    if let Some(anchor) = sub.anchor() {
        candidates.push(anchor.to_vec());
    }
    let best = candidates
        .into_iter()
        .filter(|y| sub.lower_bound().is_none_or(|l| y.iter().all(|&t| t >= l)))
        .filter_map(|y| sub.value(&y).ok().map(|val| (val, y)))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    if let Some((_, y)) = best {
        return Ok(y);
    }
    let i = (0..m)
        .min_by(|&i, &j| (sub.q().get(i, i) / sub.r().get(i, i)).total_cmp(&(sub.q().get(j, j) / sub.r().get(j, j))))
        .unwrap_or(0);
    let mut e = vec![0.0; m];
    e[i] = 1.0;
    Ok(e)
}

/// Global minimizer over all supports of size at most `q`.
pub fn solve_exact(sub: &BlockSubproblem, solver: SubSolver, enumeration: SupportEnumeration) -> Result<BlockSolution> {
    let k = sub.dim();
    let q = sub.budget.min(k);
    let empty = || -> Result<BlockSolution> {
        let v = sub.qfp.v();
        if !(v > 0.0) {
            return Err(Error::DegenerateDenominator);
        }
        Ok(BlockSolution { z: vec![0.0; k], value: sub.qfp.w() / v, support: Vec::new() })
    };
    let sizes = match enumeration {
        SupportEnumeration::MaxSize => q..=q,
        SupportEnumeration::AllSizes => 0..=q,
    };
    let mut best: Option<BlockSolution> = None;
    for size in sizes {
        if size == 0 {
            if sub.qfp.v() > 0.0 {
                let cand = empty()?;
                if best.as_ref().is_none_or(|b| cand.value < b.value) {
                    best = Some(cand);
                }
            } else if q == 0 {
                return empty();
            }
            continue;
        }
        for support in combinations(k, size) {
            let restricted = sub.qfp.restrict(&support)?;
            let sol = solve_support(&restricted, solver)?;
            if best.as_ref().is_none_or(|b| sol.value < b.value) {
                let mut z = vec![0.0; k];
                for (&pos, &val) in support.iter().zip(&sol.y) {
                    z[pos] = val;
                }
                best = Some(BlockSolution { z, value: sol.value, support });
            }
        }
    }
    best.ok_or(Error::DegenerateDenominator)
}
