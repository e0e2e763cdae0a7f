//! Dense symmetric linear algebra.
//!
//! Everything the solvers need from linear algebra goes through this module:
//! a symmetric matrix type, a full symmetric eigendecomposition (Householder
//! tridiagonalization followed by implicit QL), inverse square roots of SPD
//! matrices and shifted solves against a cached decomposition.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense symmetric matrix stored row-major.
///
/// Construction symmetrizes the input, so `get(i, j) == get(j, i)` holds
/// bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from `n * n` row-major entries, replacing each
    /// off-diagonal pair by its average.
    pub fn from_row_major(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Ok(SymMatrix { n, data })
    }

    /// Builds a matrix from a generator evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| 0.0)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    /// True when the matrix is exactly the identity.
    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == if i == j { 1.0 } else { 0.0 }))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `xᵀMx`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        let mut acc = 0.0;
        for i in 0..self.n {
            if x[i] != 0.0 {
                acc += x[i] * dot(self.row(i), x);
            }
        }
        acc
    }

    /// `xᵀMx` using only the listed nonzero positions of `x`.
    pub fn quad_form_on(&self, x: &[f64], support: &[usize]) -> f64 {
        let mut acc = 0.0;
        for &i in support {
            let row = self.row(i);
            let mut r = 0.0;
            for &j in support {
                r += row[j] * x[j];
            }
            acc += x[i] * r;
        }
        acc
    }

    pub fn add_scaled_identity(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += shift;
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        SymMatrix { n: self.n, data: self.data.iter().map(|v| v * factor).collect() }
    }

    /// Product `self * other`, symmetrized. Only meaningful when the two
    /// matrices commute or the product is known to be symmetric (e.g. `W M W`).
    fn mul_sym(&self, other: &SymMatrix) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let row = other.row(k);
                let dst = &mut out[i * n..(i + 1) * n];
                for j in 0..n {
                    dst[j] += a * row[j];
                }
            }
        }
        out
    }

    /// `W M W` for symmetric `W`, the congruence used by the reduced forms.
    pub fn congruence(&self, w: &SymMatrix) -> SymMatrix {
        let n = self.n;
        let mw = SymMatrix { n, data: self.mul_sym(w) };
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += w.data[i * n + k] * mw.data[k * n + j];
                }
                data[i * n + j] = acc;
                data[j * n + i] = acc;
            }
        }
        SymMatrix { n, data }
    }

    /// Principal submatrix `M[idx, idx]`.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Result<SymMatrix> {
        check_indices(idx, self.n)?;
        Ok(self.submatrix_unchecked(idx))
    }

    pub(crate) fn submatrix_unchecked(&self, idx: &[usize]) -> SymMatrix {
        let k = idx.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in idx {
            let row = self.row(i);
            data.extend(idx.iter().map(|&j| row[j]));
        }
        SymMatrix { n: k, data }
    }

    /// Attempts a Cholesky factorization; returns the smallest pivot on
    /// success, `None` when a pivot is not above `floor`.
    pub fn cholesky_min_pivot(&self, floor: f64) -> Option<f64> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        let mut min_pivot = f64::INFINITY;
        for j in 0..n {
            let mut d = self.data[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > floor) {
                return None;
            }
            min_pivot = min_pivot.min(d);
            let ljj = libm::sqrt(d);
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut s = self.data[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        Some(min_pivot)
    }
}

pub(crate) fn check_indices(idx: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in idx {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        if seen[i] {
            return Err(Error::DuplicateIndex(i));
        }
        seen[i] = true;
    }
    Ok(())
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Smallest eigenvalue below which a matrix is reported as not positive
/// definite: `1e-10 * max(1, ‖M‖_F)`.
pub fn pd_tol(m: &SymMatrix) -> f64 {
    1e-10 * m.frobenius_norm().max(1.0)
}

/// Minimum distance kept between a shift and the smallest eigenvalue:
/// `1e-12 * max(1, |d_min|)`.
pub fn shift_guard(d_min: f64) -> f64 {
    1e-12 * d_min.abs().max(1.0)
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    values: Vec<f64>,
    /// Row-major `n × n`; column `i` pairs with `values[i]`.
    vectors: Vec<f64>,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    /// Entry `(row, col)` of the eigenvector matrix.
    #[inline]
    pub fn vector_entry(&self, row: usize, col: usize) -> f64 {
        self.vectors[row * self.values.len() + col]
    }

    /// Column `i` of the eigenvector matrix.
    pub fn vector(&self, i: usize) -> Vec<f64> {
        (0..self.dim()).map(|r| self.vector_entry(r, i)).collect()
    }

    /// `Uᵀ g`.
    pub fn project(&self, g: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (r, &gr) in g.iter().enumerate() {
            if gr == 0.0 {
                continue;
            }
            let row = &self.vectors[r * n..(r + 1) * n];
            for c in 0..n {
                out[c] += row[c] * gr;
            }
        }
        out
    }

    /// `U a`.
    pub fn expand(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|r| dot(&self.vectors[r * n..(r + 1) * n], coeffs)).collect()
    }

    /// `U diag(f(d)) Uᵀ`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let fd: Vec<f64> = self.values.iter().map(|&d| f(d)).collect();
        SymMatrix::from_fn(n, |i, j| {
            let ri = &self.vectors[i * n..(i + 1) * n];
            let rj = &self.vectors[j * n..(j + 1) * n];
            (0..n).map(|c| ri[c] * fd[c] * rj[c]).sum()
        })
    }
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn sym_eig(m: &SymMatrix) -> Result<EigDecomposition> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    let mut v = m.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 1 {
        return Ok(EigDecomposition { values: vec![v[0]], vectors: vec![1.0] });
    }
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;
    Ok(EigDecomposition { values: d, vectors: v })
}

/// Smallest eigenvalue of `m`.
pub fn min_eigenvalue(m: &SymMatrix) -> Result<f64> {
    if m.dim() == 1 {
        return if m.is_finite() { Ok(m.get(0, 0)) } else { Err(Error::NonFinite) };
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    // Eigenvalues only: skip eigenvector accumulation.
    let n = m.dim();
    let mut v = m.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    tql2_values(n, &mut d, &mut e)?;
    Ok(d.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Checks positive definiteness against [`pd_tol`] and returns the
/// decomposition used for the check.
pub fn check_positive_definite(m: &SymMatrix) -> Result<EigDecomposition> {
    let eig = sym_eig(m)?;
    if eig.min_value() <= pd_tol(m) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: eig.min_value() });
    }
    Ok(eig)
}

/// `M^{-1/2}` for symmetric positive definite `M`.
pub fn inv_sqrt(m: &SymMatrix) -> Result<SymMatrix> {
    if m.dim() == 1 {
        let v = m.get(0, 0);
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        if v <= pd_tol(m) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: v });
        }
        return Ok(SymMatrix { n: 1, data: vec![1.0 / libm::sqrt(v)] });
    }
    let eig = check_positive_definite(m)?;
    Ok(eig.spectral_map(|d| 1.0 / libm::sqrt(d)))
}

/// Solves `(O − αI) u = −g` through the decomposition of `O`.
pub fn solve_shifted(eig: &EigDecomposition, alpha: f64, g: &[f64]) -> Result<Vec<f64>> {
    if g.len() != eig.dim() {
        return Err(Error::DimensionMismatch { expected: eig.dim(), found: g.len() });
    }
    let d_min = eig.min_value();
    if !(alpha <= d_min - shift_guard(d_min)) {
        return Err(Error::ShiftTooClose { alpha, min_eigenvalue: d_min });
    }
    let a = eig.project(g);
    let coeffs: Vec<f64> = a.iter().zip(eig.values()).map(|(ai, di)| -ai / (di - alpha)).collect();
    Ok(eig.expand(&coeffs))
}

// Householder reduction to tridiagonal form (Bowdler, Martin, Reinsch and
// Wilkinson's tred2). On exit `v` holds the accumulated orthogonal transform,
// `d` the diagonal and `e` the subdiagonal in e[1..n].
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |r: usize, c: usize| r * n + c;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

const QL_MAX_SWEEPS: usize = 64;

// Implicit QL iteration on the tridiagonal form (tql2), followed by an
// ascending sort of eigenpairs.
fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    ql_iterate(n, d, e, Some(v))?;
    for i in 0..(n - 1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for r in 0..n {
                v.swap(r * n + i, r * n + k);
            }
        }
    }
    Ok(())
}

fn tql2_values(n: usize, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    ql_iterate(n, d, e, None)
}

fn ql_iterate(n: usize, d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_SWEEPS * n.max(1) {
                    return Err(Error::NoConvergence("symmetric eigensolver"));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let hk = v[k * n + i + 1];
                            v[k * n + i + 1] = s * v[k * n + i] + c * hk;
                            v[k * n + i] = c * v[k * n + i] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reconstruct(eig: &EigDecomposition) -> SymMatrix {
        eig.spectral_map(|d| d)
    }

    fn frob_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
        libm::sqrt(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum())
    }

    fn lcg_matrix(n: usize, seed: u64) -> SymMatrix {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        SymMatrix::from_fn(n, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = sym_eig(&SymMatrix::identity(3)).unwrap();
        assert_eq!(eig.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_sorted() {
        let eig = sym_eig(&SymMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        for (got, want) in eig.values().iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        // column 0 pairs with eigenvalue 1, which sits on coordinate 1
        assert!((eig.vector_entry(1, 0).abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_reconstruction_and_orthogonality() {
        for seed in 0..20 {
            let m = lcg_matrix(5, seed);
            let eig = sym_eig(&m).unwrap();
            assert!(frob_diff(&reconstruct(&eig), &m) <= 1e-8 * m.frobenius_norm());
            for i in 0..5 {
                for j in 0..5 {
                    let g = dot(&eig.vector(i), &eig.vector(j));
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() <= 1e-10 * 5.0);
                }
            }
            assert!(eig.values().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn larger_matrix_reconstruction() {
        let m = lcg_matrix(60, 7);
        let eig = sym_eig(&m).unwrap();
        assert!(frob_diff(&reconstruct(&eig), &m) <= 1e-8 * m.frobenius_norm());
    }

    #[test]
    fn non_finite_rejected() {
        let m = SymMatrix::from_diagonal(&[1.0, f64::NAN]);
        assert_eq!(sym_eig(&m), Err(Error::NonFinite));
        assert_eq!(min_eigenvalue(&m), Err(Error::NonFinite));
    }

    #[test]
    fn inv_sqrt_cases() {
        let w = inv_sqrt(&SymMatrix::identity(3)).unwrap();
        assert!(frob_diff(&w, &SymMatrix::identity(3)) < 1e-14);
        let w = inv_sqrt(&SymMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert!((w.get(0, 0) - 0.5).abs() < 1e-14);
        assert!((w.get(1, 1) - 1.0 / 3.0).abs() < 1e-14);
        assert!(w.get(0, 1).abs() < 1e-14);
    }

    #[test]
    fn inv_sqrt_gram_identity() {
        let x = lcg_matrix(4, 3);
        // XᵀX + I
        let gram = SymMatrix::from_fn(4, |i, j| {
            (0..4).map(|k| x.get(k, i) * x.get(k, j)).sum::<f64>() + if i == j { 1.0 } else { 0.0 }
        });
        let w = inv_sqrt(&gram).unwrap();
        let wmw = gram.congruence(&w);
        assert!(frob_diff(&wmw, &SymMatrix::identity(4)) <= 1e-7 * 4.0);
    }

    #[test]
    fn inv_sqrt_rejects_indefinite() {
        match inv_sqrt(&SymMatrix::from_diagonal(&[1.0, -2.0])) {
            Err(Error::NotPositiveDefinite { min_eigenvalue }) => assert!((min_eigenvalue + 2.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            inv_sqrt(&SymMatrix::from_diagonal(&[1.0, 0.0])),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn min_eigenvalue_cases() {
        assert_eq!(min_eigenvalue(&SymMatrix::from_diagonal(&[-2.0, 5.0])).unwrap(), -2.0);
        assert_eq!(min_eigenvalue(&SymMatrix::identity(4)).unwrap(), 1.0);
        for seed in 0..10 {
            let m = lcg_matrix(7, seed + 100);
            let a = min_eigenvalue(&m).unwrap();
            let b = sym_eig(&m).unwrap().min_value();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn principal_submatrix_cases() {
        let m = SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let s = m.principal_submatrix(&[2, 0]).unwrap();
        assert_eq!(s.as_slice(), &[3.0, 0.0, 0.0, 1.0]);
        assert_eq!(m.principal_submatrix(&[0, 1, 2]).unwrap(), m);
        assert_eq!(m.principal_submatrix(&[1]).unwrap().as_slice(), &[2.0]);
        assert_eq!(m.principal_submatrix(&[3]), Err(Error::IndexOutOfRange { index: 3, dim: 3 }));
        assert_eq!(m.principal_submatrix(&[1, 1]), Err(Error::DuplicateIndex(1)));
    }

    #[test]
    fn solve_shifted_cases() {
        let eig = sym_eig(&SymMatrix::from_diagonal(&[2.0, 3.0])).unwrap();
        let u = solve_shifted(&eig, 1.0, &[1.0, 1.0]).unwrap();
        assert!((u[0] + 1.0).abs() < 1e-14 && (u[1] + 0.5).abs() < 1e-14);
        assert_eq!(solve_shifted(&eig, 1.0, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(solve_shifted(&eig, 2.0, &[1.0, 1.0]), Err(Error::ShiftTooClose { .. })));

        let o = lcg_matrix(4, 11);
        let eig = sym_eig(&o).unwrap();
        let g = [0.3, -1.2, 0.7, 0.1];
        let alpha = eig.min_value() - 0.5;
        let u = solve_shifted(&eig, alpha, &g).unwrap();
        let ou = o.mul_vec(&u);
        let res: Vec<f64> = (0..4).map(|i| ou[i] - alpha * u[i] + g[i]).collect();
        assert!(norm2(&res) <= 1e-7 * norm2(&g));
    }

    #[test]
    fn symmetrized_on_construction() {
        let m = SymMatrix::from_row_major(2, vec![1.0, 2.0, 4.0, 1.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
    }

    fn sym_strategy(n: usize) -> impl Strategy<Value = SymMatrix> {
        proptest::collection::vec(-5.0f64..5.0, n * n)
            .prop_map(move |data| SymMatrix::from_row_major(n, data).unwrap())
    }

    proptest! {
        #[test]
        fn interlacing_with_leading_block(z in (2usize..8).prop_flat_map(sym_strategy)) {
            let n = z.dim() - 1;
            let idx: Vec<usize> = (0..n).collect();
            let o = z.principal_submatrix(&idx).unwrap();
            let lz = sym_eig(&z).unwrap();
            let lo = sym_eig(&o).unwrap();
            let tol = 1e-9 * (1.0 + z.frobenius_norm());
            prop_assert!(lz.values()[0] <= lo.values()[0] + tol);
            prop_assert!(lo.values()[0] <= lz.values()[1] + tol);
        }

        #[test]
        fn inv_sqrt_commutes(m in (1usize..6).prop_flat_map(sym_strategy)) {
            let spd = SymMatrix::from_fn(m.dim(), |i, j| {
                (0..m.dim()).map(|k| m.get(i, k) * m.get(k, j)).sum::<f64>() + if i == j { 0.5 } else { 0.0 }
            });
            let w = inv_sqrt(&spd).unwrap();
            let n = spd.dim();
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let wm: f64 = (0..n).map(|k| w.get(i, k) * spd.get(k, j)).sum();
                    let mw: f64 = (0..n).map(|k| spd.get(i, k) * w.get(k, j)).sum();
                    worst = worst.max((wm - mw).abs());
                }
            }
            prop_assert!(worst <= 1e-7 * spd.frobenius_norm().max(1.0));
        }
    }
}
