//! Builders for sparse PCA, Fisher discriminant analysis and canonical
//! correlation analysis, plus Gaussian synthetic data.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use crate::decomposition::ProblemInstance;
use crate::linalg::SymMatrix;
use crate::{seeded_rng, Error, Result};

/// Default relative ridge added to the denominator matrix of FDA and CCA.
pub const DEFAULT_RIDGE: f64 = 1e-6;

/// Dense `m × d` feature matrix (row-major) with optional ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    rows: usize,
    cols: usize,
    features: Vec<f64>,
    labels: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, rows: usize, cols: usize, features: Vec<f64>, labels: Option<Vec<f64>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DegenerateData(format!("empty {rows}x{cols} feature matrix")));
        }
        if features.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: features.len() });
        }
        if !features.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(y) = &labels {
            if y.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: y.len() });
            }
            if let Some(bad) = y.iter().find(|&&l| l != 1.0 && l != -1.0) {
                return Err(Error::DegenerateData(format!("label {bad} is not ±1")));
            }
        }
        Ok(Dataset { name: name.into(), rows, cols, features, labels })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }

    /// Rows `start..end` as a new dataset.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Dataset> {
        if start >= end || end > self.rows {
            return Err(Error::DegenerateData(format!("row range {start}..{end} of {}", self.rows)));
        }
        Dataset::new(
            format!("{}[{start}..{end}]", self.name),
            end - start,
            self.cols,
            self.features[start * self.cols..end * self.cols].to_vec(),
            self.labels.as_ref().map(|y| y[start..end].to_vec()),
        )
    }
}

/// Numerator and denominator matrices of a generalized Rayleigh quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub a: SymMatrix,
    pub c: SymMatrix,
}

impl Pencil {
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Attaches a sparsity level; checks that `C` is positive definite.
    pub fn into_problem(self, s: usize) -> Result<ProblemInstance> {
        ProblemInstance::new(self.a, self.c, s)
    }
}

/// Sample covariance of the given observations, `1/(count − 1)` normalized.
/// `obs(k, i)` is variable `i` of observation `k`.
fn covariance(count: usize, dim: usize, obs: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut mean = vec![0.0; dim];
    for k in 0..count {
        for (i, m) in mean.iter_mut().enumerate() {
            *m += obs(k, i);
        }
    }
    mean.iter_mut().for_each(|m| *m /= count as f64);
    let mut cov = vec![0.0; dim * dim];
    if count < 2 {
        return cov;
    }
    let mut centered = vec![0.0; dim];
    for k in 0..count {
        for (i, c) in centered.iter_mut().enumerate() {
            *c = obs(k, i) - mean[i];
        }
        for i in 0..dim {
            let ci = centered[i];
            if ci == 0.0 {
                continue;
            }
            for j in i..dim {
                cov[i * dim + j] += ci * centered[j];
            }
        }
    }
    let scale = 1.0 / (count - 1) as f64;
    for i in 0..dim {
        for j in i..dim {
            let v = cov[i * dim + j] * scale;
            cov[i * dim + j] = v;
            cov[j * dim + i] = v;
        }
    }
    cov
}

fn mean_of(count: usize, dim: usize, obs: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut mean = vec![0.0; dim];
    for k in 0..count {
        for (i, m) in mean.iter_mut().enumerate() {
            *m += obs(k, i);
        }
    }
    mean.iter_mut().for_each(|m| *m /= count as f64);
    mean
}

fn ridge_shift(c: &[f64], dim: usize, ridge: f64) -> f64 {
    let trace: f64 = (0..dim).map(|i| c[i * dim + i]).sum();
    ridge * trace / dim as f64
}

/// `A = −Σ`, `C = I`.
pub fn build_pca(data: &Dataset) -> Result<Pencil> {
    if data.rows < 2 {
        return Err(Error::DegenerateData("covariance needs at least two samples".into()));
    }
    let d = data.cols;
    let cov = covariance(data.rows, d, |k, i| data.features[k * d + i]);
    if cov.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateData("sample covariance is zero".into()));
    }
    let a = SymMatrix::from_fn(d, |i, j| -cov[i * d + j]);
    Ok(Pencil { a, c: SymMatrix::identity(d) })
}

/// `A = −(μ₊ − μ₋)(μ₊ − μ₋)ᵀ`, `C = Σ₊ + Σ₋ + ridge·(tr/d)·I`.
pub fn build_fda(data: &Dataset, ridge: f64) -> Result<Pencil> {
    let labels = data.labels().ok_or(Error::SingleClass)?;
    let d = data.cols;
    let pos: Vec<usize> = (0..data.rows).filter(|&k| labels[k] > 0.0).collect();
    let neg: Vec<usize> = (0..data.rows).filter(|&k| labels[k] < 0.0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::SingleClass);
    }
    let class = |rows: &[usize]| {
        let obs = |k: usize, i: usize| data.features[rows[k] * d + i];
        (mean_of(rows.len(), d, obs), covariance(rows.len(), d, obs))
    };
    let (mu_pos, cov_pos) = class(&pos);
    let (mu_neg, cov_neg) = class(&neg);
    let diff: Vec<f64> = mu_pos.iter().zip(&mu_neg).map(|(a, b)| a - b).collect();
    let within: Vec<f64> = cov_pos.iter().zip(&cov_neg).map(|(a, b)| a + b).collect();
    let shift = ridge_shift(&within, d, ridge);
    let a = SymMatrix::from_fn(d, |i, j| -diff[i] * diff[j]);
    let c = SymMatrix::from_fn(d, |i, j| within[i * d + j] + if i == j { shift } else { 0.0 });
    Ok(Pencil { a, c })
}

/// Two views sharing the sample axis: rows of each view are variables and
/// the `d` columns are samples. Returns the `(m₁ + m₂)`-dimensional pencil
/// `A = −[[0, Σxy], [Σyx, 0]]`, `C = blockdiag(Σxx, Σyy) + ridge`.
pub fn build_cca(x_view: &Dataset, y_view: &Dataset, ridge: f64) -> Result<Pencil> {
    if x_view.cols != y_view.cols {
        return Err(Error::DimensionMismatch { expected: x_view.cols, found: y_view.cols });
    }
    let samples = x_view.cols;
    if samples < 2 {
        return Err(Error::DegenerateData("covariance needs at least two samples".into()));
    }
    let (m1, m2) = (x_view.rows, y_view.rows);
    let dim = m1 + m2;
    // variable i of sample k: stacked rows of both views
    let joint = |k: usize, i: usize| {
        if i < m1 {
            x_view.features[i * samples + k]
        } else {
            y_view.features[(i - m1) * samples + k]
        }
    };
    let cov = covariance(samples, dim, joint);
    let same_block = |i: usize, j: usize| (i < m1) == (j < m1);
    let mut c: Vec<f64> = (0..dim * dim).map(|e| if same_block(e / dim, e % dim) { cov[e] } else { 0.0 }).collect();
    let shift = ridge_shift(&c, dim, ridge);
    for i in 0..dim {
        c[i * dim + i] += shift;
    }
    let a = SymMatrix::from_fn(dim, |i, j| if same_block(i, j) { 0.0 } else { -cov[i * dim + j] });
    let c = SymMatrix::from_fn(dim, |i, j| c[i * dim + j]);
    Ok(Pencil { a, c })
}

/// `X = randn(m, d)` filled row by row, then `y = sign(randn(m))` with
/// zero mapped to `+1`.
pub fn gen_randn(rows: usize, cols: usize, seed: u64) -> Result<Dataset> {
    let mut rng = seeded_rng(seed);
    let features: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(&mut rng)).collect();
    let labels: Vec<f64> = (0..rows)
        .map(|_| {
            let v: f64 = StandardNormal.sample(&mut rng);
            if v < 0.0 {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    Dataset::new(format!("randn-{rows}x{cols}-seed{seed}"), rows, cols, features, Some(labels))
}
