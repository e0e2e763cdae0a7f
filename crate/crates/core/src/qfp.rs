//! Quadratic fractional programs over a handful of variables
//!
//! ```text
//! minimize L(y) = (½yᵀQy + pᵀy + w) / (½yᵀRy + cᵀy + v)     (optionally y ≥ L̂)
//! ```
//!
//! With `W = R^{-1/2}`, `h = Wc` and `u = W⁻¹y + h` the problem becomes
//! `(½uᵀOu + uᵀg + ½δ) / (½‖u‖² + ½γ)` where `O = WQW`, `g = W(p − QWh)`,
//! `γ = 2v − ‖h‖²` and `δ = cᵀR⁻¹QR⁻¹c − 2cᵀR⁻¹p + 2w`. When `γ > 0` the
//! parametric function `J(α) = min_u numerator − α·denominator` is concave
//! and strictly decreasing on `[λ_min(Z), λ_min(O))`, so its root, found by
//! bisection, is the global optimum.
//!
//! A problem with `c = 0` and `v = 0` has a denominator that vanishes at the
//! origin (`γ = 0`). This is the block subproblem whose working set covers
//! every nonzero of the iterate; it is solved in closed form through a single
//! eigenproblem instead.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::frac1d::{solve_1d, OneDimCoefficients};
use crate::linalg::{self, dot, norm2, shift_guard, sym_eig, EigDecomposition, SymMatrix};
use crate::{seeded_rng, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QfpSubproblem {
    q: SymMatrix,
    p: Vec<f64>,
    w: f64,
    r: SymMatrix,
    c: Vec<f64>,
    v: f64,
    lower_bound: Option<f64>,
    r_inv_sqrt: SymMatrix,
    gamma: f64,
    anchor: Option<Vec<f64>>,
}

impl QfpSubproblem {
    /// Validates dimensions, finiteness, `R ≻ 0` and `γ > 0` (or the
    /// homogeneous case `c = 0, v = 0`).
    pub fn new(q: SymMatrix, p: Vec<f64>, w: f64, r: SymMatrix, c: Vec<f64>, v: f64) -> Result<Self> {
        let m = q.dim();
        for len in [r.dim(), p.len(), c.len()] {
            if len != m {
                return Err(Error::DimensionMismatch { expected: m, found: len });
            }
        }
        let finite = q.is_finite()
            && r.is_finite()
            && p.iter().chain(&c).all(|x| x.is_finite())
            && w.is_finite()
            && v.is_finite();
        if !finite {
            return Err(Error::NonFinite);
        }
        let r_inv_sqrt = linalg::inv_sqrt(&r)?;
        let h = r_inv_sqrt.mul_vec(&c);
        let gamma = 2.0 * v - dot(&h, &h);
        let homogeneous = v == 0.0 && c.iter().all(|&x| x == 0.0);
        if !(gamma > 0.0) && !homogeneous {
            return Err(Error::NonPositiveGamma(gamma));
        }
        Ok(QfpSubproblem { q, p, w, r, c, v, lower_bound: None, r_inv_sqrt, gamma, anchor: None })
    }

    /// Adds the elementwise bound `y ≥ lower`.
    pub fn with_lower_bound(mut self, lower: f64) -> Self {
        self.lower_bound = Some(lower);
        self
    }

    /// Reference point used to pick the scale of the minimizer when the
    /// optimum is a whole ray (homogeneous problems with `p = 0, w = 0`).
    pub fn with_anchor(mut self, anchor: Vec<f64>) -> Self {
        self.anchor = Some(anchor);
        self
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn q(&self) -> &SymMatrix {
        &self.q
    }

    pub fn r(&self) -> &SymMatrix {
        &self.r
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.lower_bound
    }

    pub fn anchor(&self) -> Option<&[f64]> {
        self.anchor.as_deref()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_homogeneous(&self) -> bool {
        !(self.gamma > 0.0)
    }

    pub fn numerator(&self, y: &[f64]) -> f64 {
        0.5 * self.q.quad_form(y) + dot(&self.p, y) + self.w
    }

    pub fn denominator(&self, y: &[f64]) -> f64 {
        0.5 * self.r.quad_form(y) + dot(&self.c, y) + self.v
    }

    /// `L(y)`.
    pub fn value(&self, y: &[f64]) -> Result<f64> {
        let den = self.denominator(y);
        if !(den > 0.0) {
            return Err(Error::DegenerateDenominator);
        }
        Ok(self.numerator(y) / den)
    }

    fn is_feasible(&self, y: &[f64]) -> bool {
        match self.lower_bound {
            Some(l) => y.iter().all(|&yi| yi >= l),
            None => true,
        }
    }

    /// Restriction to the variables in `idx` (the others pinned at zero):
    /// principal blocks of `Q`, `R`, sub-vectors of `p`, `c`, same `w`, `v`.
    pub fn restrict(&self, idx: &[usize]) -> Result<QfpSubproblem> {
        linalg::check_indices(idx, self.dim())?;
        let pick = |x: &[f64]| idx.iter().map(|&i| x[i]).collect::<Vec<_>>();
        let mut out = QfpSubproblem::new(
            self.q.submatrix_unchecked(idx),
            pick(&self.p),
            self.w,
            self.r.submatrix_unchecked(idx),
            pick(&self.c),
            self.v,
        )?;
        out.lower_bound = self.lower_bound;
        out.anchor = self.anchor.as_deref().map(pick);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Root of `J` found strictly inside the bracket.
    BisectionRoot,
    /// `J(λ_min(Z)) ≤ 0`: the lower end of the bracket is optimal.
    BoundaryLower,
    /// `J` stays nonnegative up to `λ_min(O)`: the infimum is approached, not
    /// attained, and the returned point sits at the clamped upper end.
    BoundaryUpper,
    /// Coordinate descent stopped at a coordinate-wise minimum.
    CoordinateWiseMin,
    /// Homogeneous problem solved through one eigenproblem.
    HomogeneousEigen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfpSolution {
    pub y: Vec<f64>,
    pub value: f64,
    pub alpha_star: Option<f64>,
    pub iterations: usize,
    pub certificate: Certificate,
}

/// Data of the reduced problem in `u` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedForm {
    pub o: SymMatrix,
    pub g: Vec<f64>,
    pub gamma: f64,
    pub delta: f64,
    /// `[[O, g/√γ], [gᵀ/√γ, δ/γ]]`.
    pub z: SymMatrix,
    /// `R^{-1/2} c`, needed to map `u` back to `y`.
    pub h: Vec<f64>,
}

impl ReducedForm {
    /// `y = R^{-1/2}(u − R^{-1/2}c)`.
    pub fn recover(&self, q: &QfpSubproblem, u: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = u.iter().zip(&self.h).map(|(ui, hi)| ui - hi).collect();
        q.r_inv_sqrt.mul_vec(&d)
    }

    /// `u = R^{1/2} y + R^{-1/2} c`.
    pub fn to_reduced(&self, q: &QfpSubproblem, y: &[f64]) -> Vec<f64> {
        // R^{1/2} y = R · (R^{-1/2} y)
        let ry = q.r.mul_vec(y);
        let d = q.r_inv_sqrt.mul_vec(&ry);
        d.iter().zip(&self.h).map(|(di, hi)| di + hi).collect()
    }

    /// Reduced objective `(½uᵀOu + uᵀg + ½δ) / (½‖u‖² + ½γ)`.
    pub fn value(&self, u: &[f64]) -> f64 {
        (0.5 * self.o.quad_form(u) + dot(u, &self.g) + 0.5 * self.delta) / (0.5 * dot(u, u) + 0.5 * self.gamma)
    }
}

/// Builds `O`, `g`, `γ`, `δ` and `Z`.
pub fn assemble_reduced(q: &QfpSubproblem) -> Result<ReducedForm> {
    if q.is_homogeneous() {
        return Err(Error::NonPositiveGamma(q.gamma));
    }
    let w = &q.r_inv_sqrt;
    let h = w.mul_vec(&q.c);
    let r_inv_c = w.mul_vec(&h);
    let o = q.q.congruence(w);
    let q_rc = q.q.mul_vec(&r_inv_c);
    let resid: Vec<f64> = q.p.iter().zip(&q_rc).map(|(pi, qi)| pi - qi).collect();
    let g = w.mul_vec(&resid);
    let gamma = q.gamma;
    let delta = dot(&r_inv_c, &q_rc) - 2.0 * dot(&r_inv_c, &q.p) + 2.0 * q.w;
    let m = q.dim();
    let sg = libm::sqrt(gamma);
    let z = SymMatrix::from_fn(m + 1, |i, j| match (i < m, j < m) {
        (true, true) => o.get(i, j),
        (true, false) => g[i] / sg,
        (false, true) => g[j] / sg,
        (false, false) => delta / gamma,
    });
    Ok(ReducedForm { o, g, gamma, delta, z, h })
}

/// `J(α) = ½δ − ½αγ − ½ Σ aᵢ²/(dᵢ − α)` with `a = Uᵀg`.
pub fn j_alpha(eig_o: &EigDecomposition, g: &[f64], gamma: f64, delta: f64, alpha: f64) -> Result<f64> {
    let a = eig_o.project(g);
    ParametricFunction::new(eig_o, &a, gamma, delta).eval(alpha)
}

struct ParametricFunction<'a> {
    d: &'a [f64],
    a2: Vec<f64>,
    gamma: f64,
    delta: f64,
}

impl<'a> ParametricFunction<'a> {
    fn new(eig_o: &'a EigDecomposition, a: &[f64], gamma: f64, delta: f64) -> Self {
        ParametricFunction { d: eig_o.values(), a2: a.iter().map(|x| x * x).collect(), gamma, delta }
    }

    fn eval(&self, alpha: f64) -> Result<f64> {
        if !(alpha < self.d[0]) {
            return Err(Error::ShiftTooClose { alpha, min_eigenvalue: self.d[0] });
        }
        let sum: f64 = self.a2.iter().zip(self.d).map(|(a2, d)| a2 / (d - alpha)).sum();
        Ok(0.5 * self.delta - 0.5 * alpha * self.gamma - 0.5 * sum)
    }

    fn derivative(&self, alpha: f64) -> f64 {
        let sum: f64 = self.a2.iter().zip(self.d).map(|(a2, d)| a2 / ((d - alpha) * (d - alpha))).sum();
        -0.5 * self.gamma - 0.5 * sum
    }
}

/// Default bisection width: `1e-10 · max(1, ᾱ − α̲)`.
pub fn default_bisection_tol(lower: f64, upper: f64) -> f64 {
    1e-10 * (upper - lower).max(1.0)
}

/// Global minimizer of an unconstrained problem by bisection on `J`.
///
/// `tol` is the final bracket width; `None` selects
/// [`default_bisection_tol`].
pub fn solve_bisection(q: &QfpSubproblem, tol: Option<f64>) -> Result<QfpSolution> {
    if q.lower_bound.is_some() {
        return Err(Error::InvalidConfig("bisection handles only unconstrained problems".into()));
    }
    if q.is_homogeneous() {
        return solve_homogeneous(q);
    }
    let red = assemble_reduced(q)?;
    let eig_o = sym_eig(&red.o)?;
    let d_min = eig_o.min_value();
    let upper = d_min - shift_guard(d_min);
    let lower = linalg::min_eigenvalue(&red.z)?.min(upper);
    let a = eig_o.project(&red.g);
    let j = ParametricFunction::new(&eig_o, &a, red.gamma, red.delta);
    let zero_tol = 1e-12 * (1.0 + red.delta.abs());
    let tol = tol.unwrap_or_else(|| default_bisection_tol(lower, upper));

    let j_lo = j.eval(lower)?;
    let (alpha, iterations, certificate) = if j_lo <= zero_tol {
        (lower, 0, Certificate::BoundaryLower)
    } else if j.eval(upper)? >= -zero_tol {
        (upper, 0, Certificate::BoundaryUpper)
    } else {
        let (mut lb, mut ub) = (lower, upper);
        let mut iterations = 0;
        while ub - lb > tol {
            let mid = 0.5 * (lb + ub);
            if mid <= lb || mid >= ub {
                break;
            }
            iterations += 1;
            if j.eval(mid)? > 0.0 {
                lb = mid;
            } else {
                ub = mid;
            }
        }
        // Near the pole J is steep, so a narrow bracket can still leave a
        // large residual. J is concave and decreasing: Newton from the right
        // end stays on the J ≤ 0 side and walks monotonically to the root.
        let mut alpha = ub;
        let mut j_alpha = j.eval(alpha)?;
        for _ in 0..60 {
            if j_alpha.abs() <= zero_tol {
                break;
            }
            let next = alpha - j_alpha / j.derivative(alpha);
            if !(next > lb && next < alpha) {
                break;
            }
            alpha = next;
            j_alpha = j.eval(alpha)?;
        }
        (alpha, iterations, Certificate::BisectionRoot)
    };
    let u = linalg::solve_shifted(&eig_o, alpha, &red.g)?;
    let y = red.recover(q, &u);
    let value = q.value(&y)?;
    Ok(QfpSolution { y, value, alpha_star: Some(alpha), iterations, certificate })
}

/// Closed form for `c = 0, v = 0`:
/// `min (½yᵀQy + pᵀy + w) / ½yᵀRy`. Writing `d = R^{1/2}y = ρe` with unit `e`
/// and `t = 1/ρ`, the ratio is `eᵀOe + 2t·eᵀg + δt²` (`g = R^{-1/2}p`,
/// `δ = 2w`), whose minimum over `t` and `e` is `λ_min(O − ggᵀ/δ)` when
/// `δ > 0`.
fn solve_homogeneous(q: &QfpSubproblem) -> Result<QfpSolution> {
    let w = &q.r_inv_sqrt;
    let o = q.q.congruence(w);
    let g = w.mul_vec(&q.p);
    let delta = 2.0 * q.w;
    let g_zero = g.iter().all(|&x| x == 0.0);

    let (d, certificate) = if g_zero && delta == 0.0 {
        let eig = sym_eig(&o)?;
        (eig.vector(0), Certificate::HomogeneousEigen)
    } else if delta > 0.0 {
        let shifted = SymMatrix::from_fn(o.dim(), |i, j| o.get(i, j) - g[i] * g[j] / delta);
        let eig = sym_eig(&shifted)?;
        let e = eig.vector(0);
        let eg = dot(&e, &g);
        if eg.abs() > 1e-14 * norm2(&g).max(f64::MIN_POSITIVE) {
            let t = -eg / delta;
            (e.iter().map(|x| x / t).collect(), Certificate::HomogeneousEigen)
        } else {
            // infimum eᵀOe approached as ρ → ∞
            (e.iter().map(|x| x * 1e6).collect(), Certificate::BoundaryUpper)
        }
    } else {
        return Err(Error::UnboundedBelow { infimum: f64::NEG_INFINITY });
    };

    let mut y = w.mul_vec(&d);
    if certificate == Certificate::HomogeneousEigen && g_zero && delta == 0.0 {
        // every positive multiple is optimal; take the one closest to the anchor
        if let Some(anchor) = &q.anchor {
            let yy = dot(&y, &y);
            let tau = dot(&y, anchor) / yy;
            if tau != 0.0 && tau.is_finite() {
                y.iter_mut().for_each(|x| *x *= tau);
            }
        }
    }
    let value = q.value(&y)?;
    Ok(QfpSolution { y, value, alpha_star: None, iterations: 0, certificate })
}

/// Coordinate selection rule for [`solve_coordinate_descent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdOrder {
    Cyclic,
    /// Uniform sampling with replacement, `m` picks per sweep.
    Random { seed: u64 },
    /// Largest projected-gradient magnitude, ties to the lowest index.
    GaussSouthwell,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdOptions {
    pub order: CdOrder,
    pub max_sweeps: usize,
    /// Sweep improvement threshold; `None` means `1e-12·(1 + |L(y0)|)`.
    pub obj_tol: Option<f64>,
    /// Largest relative coordinate move allowed in the final sweep.
    pub step_tol: f64,
}

impl Default for CdOptions {
    fn default() -> Self {
        CdOptions { order: CdOrder::Cyclic, max_sweeps: 5000, obj_tol: None, step_tol: 1e-9 }
    }
}

/// Feasible default start: `0`, or `L̂·1` when the bound is positive.
pub fn default_start(q: &QfpSubproblem) -> Vec<f64> {
    let fill = match q.lower_bound {
        Some(l) if l > 0.0 => l,
        _ => 0.0,
    };
    vec![fill; q.dim()]
}

/// Exact coordinate descent: every step minimizes `L` globally along one
/// coordinate (subject to the bound) with [`solve_1d`].
pub fn solve_coordinate_descent(q: &QfpSubproblem, y0: Vec<f64>, opts: &CdOptions) -> Result<QfpSolution> {
    let m = q.dim();
    if y0.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: y0.len() });
    }
    if !q.is_feasible(&y0) {
        return Err(Error::InvalidConfig("coordinate descent start violates the lower bound".into()));
    }
    let mut state = CdState::new(q, y0)?;
    let obj_tol = opts.obj_tol.unwrap_or(1e-12 * (1.0 + state.value().abs()));
    let mut rng = match opts.order {
        CdOrder::Random { seed } => Some(seeded_rng(seed)),
        _ => None,
    };

    // sampled orders may skip coordinates, so a quiet sweep is confirmed by a cyclic one
    let mut confirming = false;
    let mut sweeps = 0;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let start = state.value();
        let mut max_step: f64 = 0.0;
        for k in 0..m {
            let i = match opts.order {
                _ if confirming => k,
                CdOrder::Cyclic => k,
                CdOrder::Random { .. } => rng.as_mut().expect("seeded").random_range(0..m),
                CdOrder::GaussSouthwell => state.steepest(q),
            };
            let beta = state.coordinate_step(q, i);
            max_step = max_step.max(beta.abs() / (1.0 + state.y[i].abs()));
        }
        state.refresh(q)?;
        let improvement = start - state.value();
        let quiet = improvement < obj_tol && max_step <= opts.step_tol;
        if quiet && (confirming || opts.order == CdOrder::Cyclic) {
            break;
        }
        confirming = quiet;
    }
    let value = q.value(&state.y)?;
    Ok(QfpSolution { y: state.y, value, alpha_star: None, iterations: sweeps, certificate: Certificate::CoordinateWiseMin })
}

struct CdState {
    y: Vec<f64>,
    qy: Vec<f64>,
    ry: Vec<f64>,
    num: f64,
    den: f64,
}

impl CdState {
    fn new(q: &QfpSubproblem, y: Vec<f64>) -> Result<Self> {
        let mut s = CdState { qy: Vec::new(), ry: Vec::new(), num: 0.0, den: 0.0, y };
        s.refresh(q)?;
        Ok(s)
    }

    fn refresh(&mut self, q: &QfpSubproblem) -> Result<()> {
        self.qy = q.q.mul_vec(&self.y);
        self.ry = q.r.mul_vec(&self.y);
        self.num = 0.5 * dot(&self.y, &self.qy) + dot(&q.p, &self.y) + q.w;
        self.den = 0.5 * dot(&self.y, &self.ry) + dot(&q.c, &self.y) + q.v;
        if !(self.den > 0.0) {
            return Err(Error::DegenerateDenominator);
        }
        Ok(())
    }

    fn value(&self) -> f64 {
        self.num / self.den
    }

    fn coefficients(&self, q: &QfpSubproblem, i: usize) -> OneDimCoefficients {
        let c = OneDimCoefficients::new(
            q.q.get(i, i),
            self.qy[i] + q.p[i],
            self.num,
            q.r.get(i, i),
            self.ry[i] + q.c[i],
            self.den,
        );
        match q.lower_bound {
            Some(l) => c.with_lower(l - self.y[i]),
            None => c,
        }
    }

    /// Moves coordinate `i` to its 1-D optimum; returns the step taken.
    fn coordinate_step(&mut self, q: &QfpSubproblem, i: usize) -> f64 {
        let coeffs = self.coefficients(q, i);
        let Ok(sol) = solve_1d(&coeffs) else {
            return 0.0;
        };
        let beta = sol.beta;
        if beta == 0.0 || !(sol.value < self.value()) {
            return 0.0;
        }
        let new_y = self.y[i] + beta;
        // land exactly on the bound when it binds
        let new_y = match q.lower_bound {
            Some(l) if coeffs.lower.is_finite() && beta == coeffs.lower => l,
            _ => new_y,
        };
        let beta = new_y - self.y[i];
        self.y[i] = new_y;
        for (k, (qk, rk)) in self.qy.iter_mut().zip(self.ry.iter_mut()).enumerate() {
            *qk += beta * q.q.get(k, i);
            *rk += beta * q.r.get(k, i);
        }
        self.num = coeffs.numerator(beta);
        self.den = coeffs.denominator(beta);
        beta
    }

    fn steepest(&self, q: &QfpSubproblem) -> usize {
        let grad = gradient_from_parts(q, &self.y, &self.qy, &self.ry, self.num, self.den);
        let mut best = 0;
        for i in 1..grad.len() {
            if grad[i].abs() > grad[best].abs() {
                best = i;
            }
        }
        best
    }
}

fn gradient_from_parts(q: &QfpSubproblem, y: &[f64], qy: &[f64], ry: &[f64], num: f64, den: f64) -> Vec<f64> {
    (0..y.len())
        .map(|i| {
            let g = ((qy[i] + q.p[i]) * den - num * (ry[i] + q.c[i])) / (den * den);
            match q.lower_bound {
                Some(l) if y[i] <= l => g.min(0.0),
                _ => g,
            }
        })
        .collect()
}

/// Gradient of `L`, projected onto the bound: components at `y_i = L̂` are
/// replaced by `min(0, ∂L/∂y_i)`.
pub fn projected_gradient(q: &QfpSubproblem, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != q.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), found: y.len() });
    }
    let qy = q.q.mul_vec(y);
    let ry = q.r.mul_vec(y);
    let num = 0.5 * dot(y, &qy) + dot(&q.p, y) + q.w;
    let den = 0.5 * dot(y, &ry) + dot(&q.c, y) + q.v;
    if !(den > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(gradient_from_parts(q, y, &qy, &ry, num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac1d::solve_1d;
    use crate::seeded_rng;
    use rand::Rng;

    fn rand_sym(rng: &mut impl Rng, m: usize) -> SymMatrix {
        SymMatrix::from_fn(m, |_, _| rng.random_range(-1.0..1.0))
    }

    fn rand_spd(rng: &mut impl Rng, m: usize) -> SymMatrix {
        let x: Vec<f64> = (0..m * m).map(|_| rng.random_range(-1.0..1.0)).collect();
        SymMatrix::from_fn(m, |i, j| {
            (0..m).map(|k| x[k * m + i] * x[k * m + j]).sum::<f64>() + if i == j { 0.5 } else { 0.0 }
        })
    }

    fn rand_vec(rng: &mut impl Rng, m: usize) -> Vec<f64> {
        (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    /// Random instance with a strictly positive denominator.
    pub(crate) fn random_instance(rng: &mut impl Rng, m: usize) -> QfpSubproblem {
        let r = rand_spd(rng, m);
        let c = rand_vec(rng, m);
        let w_inv = linalg::inv_sqrt(&r).unwrap();
        let h = w_inv.mul_vec(&c);
        let v = 0.5 * dot(&h, &h) + rng.random_range(0.1..2.0);
        QfpSubproblem::new(rand_sym(rng, m), rand_vec(rng, m), rng.random_range(-1.0..1.0), r, c, v).unwrap()
    }

    #[test]
    fn reduced_identity_instance() {
        let q = QfpSubproblem::new(SymMatrix::identity(3), vec![0.0; 3], 0.5, SymMatrix::identity(3), vec![0.0; 3], 0.5)
            .unwrap();
        let red = assemble_reduced(&q).unwrap();
        assert_eq!(red.o, SymMatrix::identity(3));
        assert_eq!(red.g, vec![0.0; 3]);
        assert_eq!(red.gamma, 1.0);
        assert_eq!(red.delta, 1.0);
        assert_eq!(red.z, SymMatrix::identity(4));
    }

    #[test]
    fn reduced_diagonal_instance() {
        let q = QfpSubproblem::new(
            SymMatrix::from_diagonal(&[2.0, 6.0]),
            vec![1.0, -3.0],
            0.7,
            SymMatrix::from_diagonal(&[4.0, 9.0]),
            vec![0.0, 0.0],
            1.0,
        )
        .unwrap();
        let red = assemble_reduced(&q).unwrap();
        assert!((red.o.get(0, 0) - 0.5).abs() < 1e-14);
        assert!((red.o.get(1, 1) - 6.0 / 9.0).abs() < 1e-14);
        assert!((red.g[0] - 0.5).abs() < 1e-14);
        assert!((red.g[1] + 1.0).abs() < 1e-14);
        assert!((red.delta - 1.4).abs() < 1e-14);
    }

    #[test]
    fn reduced_form_matches_original() {
        let mut rng = seeded_rng(1);
        for m in 1..=5 {
            let q = random_instance(&mut rng, m);
            let red = assemble_reduced(&q).unwrap();
            for _ in 0..100 {
                let y: Vec<f64> = (0..m).map(|_| rng.random_range(-3.0..3.0)).collect();
                let u = red.to_reduced(&q, &y);
                let direct = q.value(&y).unwrap();
                let reduced = red.value(&u);
                assert!((direct - reduced).abs() <= 1e-9 * (1.0 + direct.abs()), "{direct} vs {reduced}");
                let back = red.recover(&q, &u);
                assert!(back.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn j_alpha_closed_cases() {
        let eig = sym_eig(&SymMatrix::from_diagonal(&[2.0])).unwrap();
        assert!((j_alpha(&eig, &[1.0], 1.0, 0.0, 0.0).unwrap() + 0.25).abs() < 1e-15);
        let eig = sym_eig(&SymMatrix::from_diagonal(&[1.0, 3.0])).unwrap();
        for alpha in [-2.0, 0.0, 0.5] {
            let j = j_alpha(&eig, &[0.0, 0.0], 2.0, 3.0, alpha).unwrap();
            assert!((j - (1.5 - alpha)).abs() < 1e-14);
        }
        assert!(matches!(j_alpha(&eig, &[1.0, 0.0], 1.0, 1.0, 1.0), Err(Error::ShiftTooClose { .. })));
    }

    #[test]
    fn j_alpha_matches_parametric_minimum() {
        let mut rng = seeded_rng(2);
        for m in 1..=5 {
            let q = random_instance(&mut rng, m);
            let red = assemble_reduced(&q).unwrap();
            let eig = sym_eig(&red.o).unwrap();
            for _ in 0..10 {
                let alpha = eig.min_value() - rng.random_range(0.01..3.0);
                let u = linalg::solve_shifted(&eig, alpha, &red.g).unwrap();
                // evaluate the parametric objective at its minimizer directly
                let direct = 0.5 * red.o.quad_form(&u) + dot(&u, &red.g) + 0.5 * red.delta
                    - alpha * (0.5 * dot(&u, &u) + 0.5 * red.gamma);
                let j = j_alpha(&eig, &red.g, red.gamma, red.delta, alpha).unwrap();
                assert!((direct - j).abs() <= 1e-9 * (1.0 + j.abs()));
            }
        }
    }

    #[test]
    fn bisection_zero_numerator_instance() {
        let q = QfpSubproblem::new(
            SymMatrix::from_diagonal(&[1.0, 2.0]),
            vec![0.0, 0.0],
            0.0,
            SymMatrix::identity(2),
            vec![0.0, 0.0],
            0.5,
        )
        .unwrap();
        let sol = solve_bisection(&q, None).unwrap();
        assert!(sol.value.abs() < 1e-12);
        assert!(norm2(&sol.y) < 1e-9);
        assert!(sol.alpha_star.unwrap().abs() < 1e-9);
        // CD from a random start agrees
        let cd = solve_coordinate_descent(&q, vec![0.7, -0.3], &CdOptions::default()).unwrap();
        assert!(cd.value.abs() < 1e-10);
    }

    #[test]
    fn bisection_with_vanishing_g() {
        let mut rng = seeded_rng(3);
        let mut checked = 0;
        for _ in 0..50 {
            let m = 3;
            let base = random_instance(&mut rng, m);
            // p = QR⁻¹c makes g = 0
            let r_inv_c = linalg::inv_sqrt(base.r()).unwrap();
            let r_inv_c = r_inv_c.mul_vec(&r_inv_c.mul_vec(base.c()));
            let p = base.q().mul_vec(&r_inv_c);
            let q = QfpSubproblem::new(base.q().clone(), p, base.w(), base.r().clone(), base.c().to_vec(), base.v())
                .unwrap();
            let red = assemble_reduced(&q).unwrap();
            assert!(norm2(&red.g) < 1e-10);
            let lam_o = linalg::min_eigenvalue(&red.o).unwrap();
            if red.delta / red.gamma >= lam_o - 1e-6 {
                continue;
            }
            checked += 1;
            let sol = solve_bisection(&q, None).unwrap();
            assert!((sol.value - red.delta / red.gamma).abs() < 1e-9);
            for (yi, ri) in sol.y.iter().zip(&r_inv_c) {
                assert!((yi + ri).abs() < 1e-7);
            }
        }
        assert!(checked > 5);
    }

    #[test]
    fn single_variable_matches_closed_form() {
        let mut rng = seeded_rng(4);
        for _ in 0..100 {
            let q = random_instance(&mut rng, 1);
            let c = OneDimCoefficients::new(q.q().get(0, 0), q.p()[0], q.w(), q.r().get(0, 0), q.c()[0], q.v());
            let bis = solve_bisection(&q, None).unwrap();
            match solve_1d(&c) {
                Ok(one) => {
                    assert!((bis.value - one.value).abs() < 1e-8, "{} vs {}", bis.value, one.value);
                    let cd = solve_coordinate_descent(&q, vec![0.0], &CdOptions::default()).unwrap();
                    assert!((cd.value - one.value).abs() < 1e-12);
                    assert!((cd.y[0] - one.beta).abs() < 1e-12);
                }
                Err(Error::UnboundedBelow { infimum }) => {
                    assert_eq!(bis.certificate, Certificate::BoundaryUpper);
                    assert!(bis.value >= infimum - 1e-8);
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn sandwich_monotonicity_and_iteration_bound() {
        let mut rng = seeded_rng(5);
        for _ in 0..200 {
            let m = rng.random_range(1..=6);
            let q = random_instance(&mut rng, m);
            let red = assemble_reduced(&q).unwrap();
            let lam_z = linalg::min_eigenvalue(&red.z).unwrap();
            let eig = sym_eig(&red.o).unwrap();
            let lam_o = eig.min_value();
            let sol = solve_bisection(&q, None).unwrap();
            let tol = default_bisection_tol(lam_z.min(lam_o - shift_guard(lam_o)), lam_o - shift_guard(lam_o));
            assert!(lam_z - 1e-8 <= sol.value, "{lam_z} > {}", sol.value);
            assert!(sol.value < lam_o);
            if sol.certificate == Certificate::BisectionRoot {
                let alpha = sol.alpha_star.unwrap();
                assert!((sol.value - alpha).abs() <= 2.0 * tol + 1e-12 * alpha.abs(), "{} vs {alpha}", sol.value);
                let bound = libm::ceil(libm::log2((lam_o - shift_guard(lam_o) - lam_z) / tol)) as usize + 2;
                assert!(sol.iterations <= bound);
            }
            let mut prev = f64::INFINITY;
            for k in 0..=20 {
                let alpha = lam_z + (lam_o - lam_z) * k as f64 / 21.0;
                let j = j_alpha(&eig, &red.g, red.gamma, red.delta, alpha).unwrap();
                assert!(j <= prev + 1e-12 * (1.0 + j.abs()));
                prev = j;
            }
        }
    }

    #[test]
    fn bisection_beats_random_sampling() {
        let mut rng = seeded_rng(6);
        for _ in 0..30 {
            let m = rng.random_range(1..=4);
            let q = random_instance(&mut rng, m);
            let sol = solve_bisection(&q, None).unwrap();
            for _ in 0..2000 {
                let y: Vec<f64> = (0..m).map(|_| rng.random_range(-10.0..10.0)).collect();
                assert!(sol.value <= q.value(&y).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn cd_is_fixed_at_bisection_optimum() {
        let mut rng = seeded_rng(7);
        for _ in 0..30 {
            let m = rng.random_range(1..=5);
            let q = random_instance(&mut rng, m);
            let bis = solve_bisection(&q, None).unwrap();
            if bis.certificate != Certificate::BisectionRoot {
                continue;
            }
            let cd = solve_coordinate_descent(&q, bis.y.clone(), &CdOptions::default()).unwrap();
            assert!(cd.iterations <= 2, "took {} sweeps", cd.iterations);
            assert!((cd.value - bis.value).abs() <= 1e-9 * (1.0 + bis.value.abs()));
        }
    }

    #[test]
    fn cd_orders_reach_coordinate_wise_minimum() {
        let mut rng = seeded_rng(8);
        let mut diverged = 0;
        for order in [CdOrder::Cyclic, CdOrder::Random { seed: 3 }, CdOrder::GaussSouthwell] {
            for _ in 0..20 {
                let m = rng.random_range(1..=6);
                let q = random_instance(&mut rng, m);
                if solve_bisection(&q, None).unwrap().certificate == Certificate::BoundaryUpper {
                    // no finite minimizer: coordinate descent drifts toward infinity
                    continue;
                }
                let opts = CdOptions { order, max_sweeps: 200_000, ..CdOptions::default() };
                let sol = solve_coordinate_descent(&q, default_start(&q), &opts).unwrap();
                if norm2(&sol.y) > 1e3 {
                    // drifting toward an infimum at infinity along a nonconvex valley
                    diverged += 1;
                    continue;
                }
                for i in 0..m {
                    let state = CdState::new(&q, sol.y.clone()).unwrap();
                    if let Ok(one) = solve_1d(&state.coefficients(&q, i)) {
                        assert!(
                            one.beta.abs() <= 1e-8 * (1.0 + sol.y[i].abs()) || one.value >= sol.value - 1e-10 * (1.0 + sol.value.abs()),
                            "{order:?}: coordinate {i} moves by {}",
                            one.beta
                        );
                    }
                }
            }
        }
        assert!(diverged < 20, "{diverged} of 60 runs diverged");
    }

    #[test]
    fn cd_objective_never_increases() {
        let mut rng = seeded_rng(9);
        for _ in 0..20 {
            let m = rng.random_range(2..=6);
            let q = random_instance(&mut rng, m);
            let mut state = CdState::new(&q, default_start(&q)).unwrap();
            let mut prev = state.value();
            for step in 0..60 {
                state.coordinate_step(&q, step % m);
                let now = q.value(&state.y).unwrap();
                assert!(now <= prev + 1e-12 * (1.0 + prev.abs()));
                prev = now;
            }
        }
    }

    #[test]
    fn cd_with_nonnegativity_bound_meets_kkt() {
        // unconstrained optimum of ½‖y − a‖²-like ratio pushes coordinate 1 negative
        let q = QfpSubproblem::new(
            SymMatrix::identity(2),
            vec![-1.0, 2.0],
            3.0,
            SymMatrix::identity(2),
            vec![0.0, 0.0],
            1.0,
        )
        .unwrap();
        let unconstrained = solve_bisection(&q, None).unwrap();
        assert!(unconstrained.y[1] < 0.0);
        let bounded = q.clone().with_lower_bound(0.0);
        let sol = solve_coordinate_descent(&bounded, vec![0.0, 0.0], &CdOptions::default()).unwrap();
        assert_eq!(sol.y[1], 0.0);
        let pg = projected_gradient(&bounded, &sol.y).unwrap();
        let full = projected_gradient(&q, &sol.y).unwrap();
        assert!(full[1] >= 0.0);
        assert!(pg.iter().all(|g| g.abs() < 1e-7), "{pg:?}");
    }

    #[test]
    fn projected_gradient_cases() {
        let q = QfpSubproblem::new(SymMatrix::identity(2), vec![0.0; 2], 0.0, SymMatrix::identity(2), vec![0.0; 2], 1.0)
            .unwrap();
        assert_eq!(projected_gradient(&q, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        // y_0 on the bound with positive partial derivative
        let qb = QfpSubproblem::new(SymMatrix::identity(2), vec![1.0, 0.0], 1.0, SymMatrix::identity(2), vec![0.0; 2], 1.0)
            .unwrap()
            .with_lower_bound(0.0);
        let pg = projected_gradient(&qb, &[0.0, 1.0]).unwrap();
        assert_eq!(pg[0], 0.0);
    }

    #[test]
    fn projected_gradient_finite_differences() {
        let mut rng = seeded_rng(10);
        for _ in 0..50 {
            let m = rng.random_range(1..=6);
            let q = random_instance(&mut rng, m);
            let y: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let g = projected_gradient(&q, &y).unwrap();
            for i in 0..m {
                let h = 1e-6 * (1.0 + y[i].abs());
                let mut yp = y.clone();
                let mut ym = y.clone();
                yp[i] += h;
                ym[i] -= h;
                let fd = (q.value(&yp).unwrap() - q.value(&ym).unwrap()) / (2.0 * h);
                assert!((g[i] - fd).abs() <= 1e-5, "{} vs {fd}", g[i]);
            }
        }
    }

    #[test]
    fn bisection_and_best_restart_cd_agree() {
        let mut rng = seeded_rng(11);
        let mut agree = 0;
        let total = 100;
        for _ in 0..total {
            let m = rng.random_range(1..=6);
            let q = random_instance(&mut rng, m);
            let bis = solve_bisection(&q, None).unwrap();
            let mut best = f64::INFINITY;
            for _ in 0..10 {
                let y0: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
                let sol = solve_coordinate_descent(&q, y0, &CdOptions::default()).unwrap();
                best = best.min(sol.value);
            }
            assert!(best >= bis.value - 1e-8);
            if (best - bis.value).abs() <= 1e-6 {
                agree += 1;
            }
        }
        assert!(agree * 100 >= 99 * total, "{agree}/{total}");
    }

    #[test]
    fn homogeneous_problem_is_generalized_eigenvalue() {
        let a = SymMatrix::from_row_major(2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let c = SymMatrix::from_diagonal(&[1.0, 2.0]);
        let q = QfpSubproblem::new(a.clone(), vec![0.0; 2], 0.0, c.clone(), vec![0.0; 2], 0.0).unwrap();
        assert!(q.is_homogeneous());
        assert!(matches!(assemble_reduced(&q), Err(Error::NonPositiveGamma(_))));
        let sol = solve_bisection(&q, None).unwrap();
        let w = linalg::inv_sqrt(&c).unwrap();
        let lam = linalg::min_eigenvalue(&a.congruence(&w)).unwrap();
        assert!((sol.value - lam).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_with_proximal_terms() {
        // θ-proximal block with x_N = 0: numerator ½yᵀAy + θ/2‖y − x‖²
        let mut rng = seeded_rng(12);
        for _ in 0..20 {
            let m = 3;
            let a = rand_sym(&mut rng, m);
            let c = rand_spd(&mut rng, m);
            let x = rand_vec(&mut rng, m);
            let theta = 0.3;
            let q = QfpSubproblem::new(
                a.add_scaled_identity(theta),
                x.iter().map(|v| -theta * v).collect(),
                0.5 * theta * dot(&x, &x),
                c,
                vec![0.0; m],
                0.0,
            )
            .unwrap();
            let sol = solve_bisection(&q, None).unwrap();
            for _ in 0..3000 {
                let y: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
                assert!(sol.value <= q.value(&y).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn rejects_nonpositive_gamma() {
        let r = QfpSubproblem::new(SymMatrix::identity(1), vec![0.0], 0.0, SymMatrix::identity(1), vec![2.0], 1.0);
        assert!(matches!(r, Err(Error::NonPositiveGamma(_))));
        let r = QfpSubproblem::new(SymMatrix::identity(1), vec![0.0], 0.0, SymMatrix::from_diagonal(&[-1.0]), vec![0.0], 1.0);
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
    }
}
