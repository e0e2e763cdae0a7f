//! Working-set selection: uniform random blocks, greedy swapping pairs, and
//! the hybrid of both.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::decomposition::ProblemInstance;
use crate::frac1d::{solve_1d, OneDimCoefficients};
use crate::linalg::dot;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Random,
    SwapSupport,
    SwapZero,
}

/// Sorted, duplicate-free block of coordinates with the reason each was picked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkingSetSelection {
    indices: Vec<usize>,
    provenance: Vec<Provenance>,
}

impl WorkingSetSelection {
    fn from_parts(mut parts: Vec<(usize, Provenance)>) -> Self {
        parts.sort_by_key(|p| p.0);
        let (indices, provenance) = parts.into_iter().unzip();
        WorkingSetSelection { indices, provenance }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// How a (support, zero) pair is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwapRule {
    /// Best single move the pair block can make: the exchange, a line search
    /// along `i`, or a line search along `j` when the budget has room.
    #[default]
    Combined,
    /// Drop support coordinate `i`, then move optimally along zero coordinate `j`.
    Exchange,
    /// The formula as printed: `min_β f(x + βe_i − x_j e_j) − f(x)` with
    /// `x_j = 0`, i.e. a line search along the support coordinate `i`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapDescentEntry {
    pub i: usize,
    pub j: usize,
    pub descent: f64,
}

/// `k` distinct indices drawn uniformly from `0..n`.
pub fn select_random(n: usize, k: usize, rng: &mut impl Rng) -> Result<WorkingSetSelection> {
    if k == 0 || k > n {
        return Err(Error::InvalidK(format!("k = {k} must lie in 1..={n}")));
    }
    let parts = index::sample(rng, n, k).into_iter().map(|i| (i, Provenance::Random)).collect();
    Ok(WorkingSetSelection::from_parts(parts))
}

/// Products with the current iterate, shared by every pair.
struct SwapContext<'a> {
    problem: &'a ProblemInstance,
    x: &'a [f64],
    ax: Vec<f64>,
    cx: Vec<f64>,
    xax: f64,
    xcx: f64,
    f: f64,
    support: Vec<usize>,
    zeros: Vec<usize>,
}

impl<'a> SwapContext<'a> {
    fn new(problem: &'a ProblemInstance, x: &'a [f64]) -> Result<Self> {
        let n = problem.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let (support, zeros): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| x[i] != 0.0);
        if support.is_empty() {
            return Err(Error::ZeroVector);
        }
        let ax = problem.a().mul_vec(x);
        let cx = problem.c().mul_vec(x);
        let xax = dot(x, &ax);
        let xcx = dot(x, &cx);
        Ok(SwapContext { problem, x, ax, cx, xax, xcx, f: xax / xcx, support, zeros })
    }

    fn descent(&self, i: usize, j: usize, rule: SwapRule) -> Result<f64> {
        match rule {
            SwapRule::Exchange => self.exchange(i, j),
            SwapRule::Literal => self.line(i),
            SwapRule::Combined => Ok(self.exchange(i, j)?.min(self.line(i)?).min(self.line(j)?)),
        }
    }

    /// Descent of removing `i` and moving optimally along `j`.
    fn exchange(&self, i: usize, j: usize) -> Result<f64> {
        let a = self.problem.a();
        let c = self.problem.c();
        if self.support.len() == 1 {
            // removing i leaves nothing; the best point on the line is e_j itself
            return Ok(a.get(j, j) / c.get(j, j) - self.f);
        }
        let xi = self.x[i];
        // v = x − x_i e_i
        let av_j = self.ax[j] - xi * a.get(j, i);
        let cv_j = self.cx[j] - xi * c.get(j, i);
        let vav = self.xax - 2.0 * xi * self.ax[i] + xi * xi * a.get(i, i);
        let vcv = self.xcx - 2.0 * xi * self.cx[i] + xi * xi * c.get(i, i);
        let coeffs = OneDimCoefficients::new(a.get(j, j), av_j, 0.5 * vav, c.get(j, j), cv_j, 0.5 * vcv);
        let coeffs = match self.problem.lower_bound() {
            Some(l) => coeffs.with_lower(l),
            None => coeffs,
        };
        self.best_on_line(&coeffs)
    }

    /// Descent of a line search along coordinate `k` from `x`. A zero
    /// coordinate may only enter while the budget has room.
    fn line(&self, k: usize) -> Result<f64> {
        let on_support = self.x[k] != 0.0;
        if !on_support && self.support.len() >= self.problem.s() {
            return Ok(f64::INFINITY);
        }
        if on_support && self.support.len() == 1 {
            // the line through x along its only nonzero is a single ray
            return Ok(0.0);
        }
        let a = self.problem.a();
        let c = self.problem.c();
        let coeffs = OneDimCoefficients::new(a.get(k, k), self.ax[k], 0.5 * self.xax, c.get(k, k), self.cx[k], 0.5 * self.xcx);
        let coeffs = match self.problem.lower_bound() {
            Some(l) => coeffs.with_lower(l - self.x[k]),
            None => coeffs,
        };
        self.best_on_line(&coeffs)
    }

    fn best_on_line(&self, coeffs: &OneDimCoefficients) -> Result<f64> {
        match solve_1d(coeffs) {
            Ok(sol) => Ok(sol.value - self.f),
            Err(Error::UnboundedBelow { infimum }) => Ok(infimum - self.f),
            Err(e) => Err(e),
        }
    }

    fn matrix(&self, rule: SwapRule) -> Result<Vec<SwapDescentEntry>> {
        let n = self.x.len();
        // line searches are shared by every pair containing the coordinate
        let lines = match rule {
            SwapRule::Exchange => None,
            _ => Some((0..n).map(|k| self.line(k)).collect::<Result<Vec<f64>>>()?),
        };
        let mut entries = Vec::with_capacity(self.support.len() * self.zeros.len());
        for &i in &self.support {
            for &j in &self.zeros {
                let descent = match (rule, &lines) {
                    (SwapRule::Literal, Some(l)) => l[i],
                    (SwapRule::Combined, Some(l)) => self.exchange(i, j)?.min(l[i]).min(l[j]),
                    _ => self.exchange(i, j)?,
                };
                entries.push(SwapDescentEntry { i, j, descent });
            }
        }
        entries.sort_by(|p, q| p.descent.total_cmp(&q.descent).then(p.i.cmp(&q.i)).then(p.j.cmp(&q.j)));
        Ok(entries)
    }
}

/// Exact descent `D_ij` of exchanging support coordinate `i` for zero
/// coordinate `j`.
pub fn swap_descent(problem: &ProblemInstance, x: &[f64], i: usize, j: usize, rule: SwapRule) -> Result<f64> {
    let ctx = SwapContext::new(problem, x)?;
    let n = problem.dim();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, dim: n });
        }
    }
    if x[i] == 0.0 || x[j] != 0.0 {
        return Err(Error::InvalidConfig(format!("pair ({i}, {j}) must take i from the support and j from the zeros")));
    }
    ctx.descent(i, j, rule)
}

/// All pairs of support × zero coordinates sorted by `(D, i, j)`.
pub fn swap_descent_matrix(problem: &ProblemInstance, x: &[f64], rule: SwapRule) -> Result<Vec<SwapDescentEntry>> {
    SwapContext::new(problem, x)?.matrix(rule)
}

fn greedy_pairs(entries: &[SwapDescentEntry], n: usize, pairs: usize) -> Vec<(usize, Provenance)> {
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(2 * pairs);
    for e in entries {
        if out.len() == 2 * pairs {
            break;
        }
        if used[e.i] || used[e.j] {
            continue;
        }
        used[e.i] = true;
        used[e.j] = true;
        out.push((e.i, Provenance::SwapSupport));
        out.push((e.j, Provenance::SwapZero));
    }
    out
}

/// Top `k_swap/2` non-overlapping pairs by swap descent.
pub fn select_swapping(
    problem: &ProblemInstance,
    x: &[f64],
    k_swap: usize,
    rule: SwapRule,
) -> Result<WorkingSetSelection> {
    if k_swap == 0 || !k_swap.is_multiple_of(2) {
        return Err(Error::InvalidK(format!("swap count {k_swap} must be positive and even")));
    }
    let ctx = SwapContext::new(problem, x)?;
    let pairs = k_swap / 2;
    if ctx.support.len() < pairs || ctx.zeros.len() < pairs {
        return Err(Error::InsufficientCoordinates {
            needed: pairs,
            support: ctx.support.len(),
            zeros: ctx.zeros.len(),
        });
    }
    let entries = ctx.matrix(rule)?;
    Ok(WorkingSetSelection::from_parts(greedy_pairs(&entries, problem.dim(), pairs)))
}

/// `w` coordinates by swapping, then `r` uniformly random ones from the rest.
///
/// When the iterate has fewer than `w/2` support or zero coordinates, as many
/// pairs as exist are taken and the random part grows to keep `|B| = r + w`.
pub fn select_hybrid(
    problem: &ProblemInstance,
    x: &[f64],
    random_count: usize,
    swap_count: usize,
    rule: SwapRule,
    rng: &mut impl Rng,
) -> Result<WorkingSetSelection> {
    let n = problem.dim();
    let k = random_count + swap_count;
    if k == 0 || k > n {
        return Err(Error::InvalidK(format!("k = {k} must lie in 1..={n}")));
    }
    if !swap_count.is_multiple_of(2) {
        return Err(Error::InvalidK(format!("swap count {swap_count} must be even")));
    }
    let mut parts = Vec::with_capacity(k);
    if swap_count > 0 {
        let ctx = SwapContext::new(problem, x)?;
        let pairs = (swap_count / 2).min(ctx.support.len()).min(ctx.zeros.len());
        if pairs > 0 {
            let entries = ctx.matrix(rule)?;
            parts = greedy_pairs(&entries, n, pairs);
        }
    }
    let taken: Vec<bool> = {
        let mut t = vec![false; n];
        parts.iter().for_each(|p| t[p.0] = true);
        t
    };
    let rest: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
    let need = k - parts.len();
    for pos in index::sample(rng, rest.len(), need) {
        parts.push((rest[pos], Provenance::Random));
    }
    Ok(WorkingSetSelection::from_parts(parts))
}
