//! Global minimization of a one-dimensional ratio of quadratics
//!
//! ```text
//! ψ(β) = (½aβ² + bβ + c) / (½rβ² + sβ + t),   β ≥ L
//! ```
//!
//! Setting ψ' to zero leaves the quadratic `½πβ² + ϑβ + ι = 0` with
//! `π = as − br`, `ϑ = at − cr`, `ι = bt − cs`. Its (at most two) roots,
//! clamped to `[L, ∞)`, plus `L` itself when finite, are the only places the
//! minimum can sit when it is attained.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneDimCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
    /// Lower bound on β; `-inf` when unconstrained.
    pub lower: f64,
}

impl OneDimCoefficients {
    pub fn new(a: f64, b: f64, c: f64, r: f64, s: f64, t: f64) -> Self {
        OneDimCoefficients { a, b, c, r, s, t, lower: f64::NEG_INFINITY }
    }

    pub fn with_lower(mut self, lower: f64) -> Self {
        self.lower = lower;
        self
    }

    #[inline]
    pub fn numerator(&self, beta: f64) -> f64 {
        (0.5 * self.a * beta + self.b) * beta + self.c
    }

    #[inline]
    pub fn denominator(&self, beta: f64) -> f64 {
        (0.5 * self.r * beta + self.s) * beta + self.t
    }

    /// Checks finiteness and that the denominator stays positive on the whole
    /// feasible half-line.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.b, self.c, self.r, self.s, self.t].iter().all(|v| v.is_finite());
        if !finite || self.lower.is_nan() || self.lower == f64::INFINITY {
            return Err(Error::NonFinite);
        }
        let positive = if self.lower == f64::NEG_INFINITY {
            if self.r > 0.0 {
                self.s * self.s < 2.0 * self.r * self.t
            } else {
                self.r == 0.0 && self.s == 0.0 && self.t > 0.0
            }
        } else if self.r > 0.0 {
            let vertex = (-self.s / self.r).max(self.lower);
            self.denominator(vertex) > 0.0
        } else {
            self.r == 0.0 && self.s >= 0.0 && self.denominator(self.lower) > 0.0
        };
        if positive {
            Ok(())
        } else {
            Err(Error::DegenerateDenominator)
        }
    }

    /// Smallest limit of ψ over the unbounded ends of the feasible set.
    fn limit_at_infinity(&self) -> f64 {
        let up = if self.r > 0.0 {
            self.a / self.r
        } else if self.a != 0.0 {
            // r = 0: numerator quadratic over a linear or constant denominator
            if self.a > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else if self.s > 0.0 {
            self.b / self.s
        } else if self.b != 0.0 {
            if self.b > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else {
            self.c / self.t
        };
        if self.lower == f64::NEG_INFINITY && self.r == 0.0 && self.a == 0.0 && self.b != 0.0 {
            // linear numerator over a constant: one of the two ends dives
            return f64::NEG_INFINITY;
        }
        up
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneDimSolution {
    pub beta: f64,
    pub value: f64,
    candidates: [f64; 3],
    n_candidates: usize,
}

impl OneDimSolution {
    /// The points that were compared, after clamping to the lower bound.
    pub fn candidates(&self) -> &[f64] {
        &self.candidates[..self.n_candidates]
    }
}

/// Evaluates ψ at `beta`.
pub fn psi_value(c: &OneDimCoefficients, beta: f64) -> Result<f64> {
    let den = c.denominator(beta);
    if !(den > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(c.numerator(beta) / den)
}

/// Stationary points of ψ, i.e. real roots of `½πβ² + ϑβ + ι`.
/// Returns `None` when the discriminant is negative.
pub(crate) fn stationary_points(c: &OneDimCoefficients) -> Option<([f64; 2], usize)> {
    let pi = c.a * c.s - c.b * c.r;
    let theta = c.a * c.t - c.c * c.r;
    let iota = c.b * c.t - c.c * c.s;
    let pi_scale = (c.a * c.s).abs() + (c.b * c.r).abs();
    if pi == 0.0 || pi.abs() <= 1e-14 * pi_scale {
        if theta != 0.0 {
            return Some(([-iota / theta, 0.0], 1));
        }
        return Some(([0.0, 0.0], 1));
    }
    let disc = theta * theta - 2.0 * pi * iota;
    if disc < 0.0 {
        return None;
    }
    let sq = libm::sqrt(disc);
    let q = -(theta + libm::copysign(sq, theta));
    if q == 0.0 {
        // theta = 0 and disc = 0: double root at zero
        return Some(([0.0, 0.0], 1));
    }
    let (r1, r2) = (q / pi, 2.0 * iota / q);
    Some(if r1 <= r2 { ([r1, r2], 2) } else { ([r2, r1], 2) })
}

/// Global minimizer of ψ on `[L, ∞)`.
///
/// Fails with [`Error::UnboundedBelow`] when ψ has no finite minimizer (its
/// infimum is only approached as |β| grows), and with
/// [`Error::DegenerateDenominator`] when the denominator is not positive on
/// the feasible set.
pub fn solve_1d(c: &OneDimCoefficients) -> Result<OneDimSolution> {
    c.validate()?;
    let has_lower = c.lower.is_finite();
    let clamp = |beta: f64| if has_lower { beta.max(c.lower) } else { beta };

    let mut candidates = [0.0; 3];
    let mut n = 0;
    match stationary_points(c) {
        Some((roots, count)) => {
            for &root in &roots[..count] {
                candidates[n] = clamp(root);
                n += 1;
            }
        }
        None if !has_lower => return Err(Error::UnboundedBelow { infimum: c.limit_at_infinity() }),
        None => {}
    }
    if has_lower {
        candidates[n] = c.lower;
        n += 1;
    }

    let mut best: Option<(f64, f64)> = None;
    for &beta in &candidates[..n] {
        let value = psi_value(c, beta)?;
        best = Some(match best {
            None => (beta, value),
            Some((bb, bv)) => {
                let tie = (value - bv).abs() <= 1e-15 * bv.abs().max(1.0);
                if tie {
                    if beta < bb {
                        (beta, value.min(bv))
                    } else {
                        (bb, bv)
                    }
                } else if value < bv {
                    (beta, value)
                } else {
                    (bb, bv)
                }
            }
        });
    }
    let (beta, value) = best.expect("at least one candidate");

    let limit = c.limit_at_infinity();
    if limit < value - 1e-12 * value.abs().max(1.0) {
        return Err(Error::UnboundedBelow { infimum: limit });
    }
    Ok(OneDimSolution { beta, value: psi_value(c, beta)?, candidates, n_candidates: n })
}
