//! Dense real linear algebra: the matrix carrier, a symmetric eigensolver,
//! PSD-aware Cholesky factorization and Gram matrices.
//!
//! Everything here is single-threaded and uses a fixed summation order, so
//! results are bitwise reproducible for a given input.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Maximum absolute asymmetry accepted by the symmetric routines.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default tolerance below zero for an eigenvalue to still count as PSD.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// QL iterations allowed per eigenvalue before giving up.
const MAX_QL_ITERATIONS: usize = 100;

/// Row-major rectangular matrix of finite `f64` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for DenseMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        DenseMatrix::from_row_major(raw.rows, raw.cols, raw.data)
    }
}

impl From<DenseMatrix> for RawMatrix {
    fn from(m: DenseMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(invalid("ragged rows"));
        }
        Self::from_row_major(r, c, rows.concat())
    }

    /// Builds a matrix from an entry function. Panics on zero dimensions.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self::from_row_major(n, n, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(invalid("empty column selection"));
        }
        if let Some(&bad) = columns.iter().find(|&&j| j >= self.cols) {
            return Err(invalid(format!(
                "column {bad} out of range for {} columns",
                self.cols
            )));
        }
        Ok(Self::from_fn(self.rows, columns.len(), |i, j| {
            self.get(i, columns[j])
        }))
    }

    /// Principal submatrix on `indices` (rows and columns).
    pub fn principal_submatrix(&self, indices: &[usize]) -> Result<Self> {
        if !self.is_square() {
            return Err(invalid("principal submatrix of a non-square matrix"));
        }
        if indices.is_empty() || indices.iter().any(|&i| i >= self.rows) {
            return Err(invalid("principal submatrix indices out of range"));
        }
        Ok(Self::from_fn(indices.len(), indices.len(), |i, j| {
            self.get(indices[i], indices[j])
        }))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![0.0; self.rows * rhs.cols];
        for i in 0..self.rows {
            let dst = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for (d, b) in dst.iter_mut().zip(rhs.row(k)) {
                    *d += a * b;
                }
            }
        }
        Self::from_row_major(self.rows, rhs.cols, out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(invalid(format!(
                "vector of length {} for a matrix with {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| factor * self.get(i, j))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(invalid("dimension mismatch in max_abs_diff"));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| f64::max(acc, (a - b).abs())))
    }

    pub fn max_abs_asymmetry(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(invalid(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        Ok(worst)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows)
            .map(|i| self.get(i, j) * self.get(i, j))
            .sum::<f64>()
            .sqrt()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// `sqrt(a² + b²)` without intermediate overflow, using only IEEE `sqrt` so
/// it is identical across platforms.
#[inline]
fn hypot(a: f64, b: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big == 0.0 {
        return 0.0;
    }
    let r = small / big;
    big * (1.0 + r * r).sqrt()
}

/// Eigenvalues sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        *self.values.last().expect("spectrum is never empty")
    }

    /// `max |λ - 1|`.
    pub fn deviation_from_one(&self) -> f64 {
        (self.largest() - 1.0)
            .abs()
            .max((1.0 - self.smallest()).abs())
    }
}

/// Eigenvalues with orthonormal eigenvectors. `vectors` holds eigenvector
/// `i` in column `i`, matching the descending order of `values`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }
}

/// Validates squareness and symmetry and returns the averaged symmetric
/// matrix as a row-major buffer.
fn symmetrized(m: &DenseMatrix) -> Result<Vec<f64>> {
    let asym = m.max_abs_asymmetry()?;
    if asym > SYMMETRY_TOL {
        return Err(invalid(format!(
            "matrix is not symmetric: max |M - M^T| = {asym:e}"
        )));
    }
    let n = m.rows();
    let mut a = m.as_slice().to_vec();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = avg;
            a[j * n + i] = avg;
        }
    }
    Ok(a)
}

/// All eigenvalues of a symmetric matrix, sorted descending.
pub fn sym_eigenvalues(m: &DenseMatrix) -> Result<Spectrum> {
    let mut a = symmetrized(m)?;
    let values = eigen_in_place(&mut a, m.rows(), false)?;
    Ok(Spectrum { values })
}

/// Eigenvalues and eigenvectors of a symmetric matrix, sorted descending.
pub fn sym_eigen(m: &DenseMatrix) -> Result<EigenDecomposition> {
    let n = m.rows();
    let mut a = symmetrized(m)?;
    let values = eigen_in_place(&mut a, n, true)?;
    let vectors = DenseMatrix::from_row_major(n, n, a)?;
    Ok(EigenDecomposition { values, vectors })
}

/// `max |λ - 1|` over the eigenvalues of `m`.
pub fn spectral_deviation_from_identity(m: &DenseMatrix) -> Result<f64> {
    Ok(sym_eigenvalues(m)?.deviation_from_one())
}

/// Reusable buffers for repeated small eigenvalue problems.
#[derive(Debug, Default)]
pub(crate) struct EigenScratch {
    a: Vec<f64>,
}

impl EigenScratch {
    /// Eigenvalues (descending) of the symmetric `n×n` row-major matrix
    /// produced by `fill`, computed without allocation after warm-up.
    pub(crate) fn eigenvalues_of(
        &mut self,
        n: usize,
        fill: impl FnOnce(&mut [f64]),
    ) -> Result<Vec<f64>> {
        self.a.clear();
        self.a.resize(n * n, 0.0);
        fill(&mut self.a);
        eigen_in_place(&mut self.a, n, false)
    }
}

/// Symmetric eigensolver on a row-major buffer holding a symmetric matrix.
///
/// Householder tridiagonalization followed by implicit QL with Wilkinson
/// shifts. When `want_vectors` is set, `a` is overwritten with the
/// eigenvectors (column `i` for value `i`). Values come back descending.
fn eigen_in_place(a: &mut [f64], n: usize, want_vectors: bool) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    match n {
        0 => return Err(invalid("empty matrix")),
        1 => {
            let v = a[0];
            a[0] = 1.0;
            return Ok(vec![v]);
        }
        2 => return Ok(eigen_2x2(a, want_vectors)),
        _ => {}
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(a, n, &mut d, &mut e, want_vectors);
    ql_implicit(a, n, &mut d, &mut e, want_vectors)?;

    // Descending order, ties broken by original position for stability.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    if want_vectors {
        let v = a.to_vec();
        for (dst, &src) in order.iter().enumerate() {
            for k in 0..n {
                a[k * n + dst] = v[k * n + src];
            }
        }
    }
    Ok(values)
}

/// Closed form for 2×2 symmetric `[[p, q], [q, r]]`.
///
/// For `p == r` the values are exactly `p ± |q|` up to one rounding each.
fn eigen_2x2(a: &mut [f64], want_vectors: bool) -> Vec<f64> {
    let (p, q, r) = (a[0], a[1], a[3]);
    let mean = 0.5 * (p + r);
    let half_gap = 0.5 * (p - r);
    let radius = hypot(half_gap, q);
    let hi = mean + radius;
    let lo = mean - radius;
    if want_vectors {
        // Rotation angle of the eigenvector for `hi`.
        let (c, s) = if q == 0.0 {
            if p >= r {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            }
        } else {
            // (hi - r, q) and (q, hi - p) are both eigenvectors; pick the
            // better-conditioned one.
            let (x, y) = if half_gap >= 0.0 {
                (radius + half_gap, q)
            } else {
                (q, radius - half_gap)
            };
            let h = hypot(x, y);
            (x / h, y / h)
        };
        a[0] = c;
        a[2] = s;
        a[1] = -s;
        a[3] = c;
    }
    vec![hi, lo]
}

/// Householder reduction to tridiagonal form (EISPACK `tred2` layout).
/// On exit `d` holds the diagonal, `e[1..]` the subdiagonal and, when
/// `want_vectors` is set, `a` holds the accumulated orthogonal transform.
fn tridiagonalize(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], want_vectors: bool) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = a[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = a[idx(i - 1, j)];
                a[idx(i, j)] = 0.0;
                a[idx(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e[..i].iter_mut() {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                a[idx(j, i)] = f;
                g = e[j] + a[idx(j, j)] * f;
                for k in j + 1..i {
                    g += a[idx(k, j)] * d[k];
                    e[k] += a[idx(k, j)] * f;
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
                    a[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = a[idx(i - 1, j)];
                a[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !want_vectors {
        for j in 0..n {
            d[j] = a[idx(j, j)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        a[idx(n - 1, i)] = a[idx(i, i)];
        a[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = a[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += a[idx(k, i + 1)] * a[idx(k, j)];
                }
                for k in 0..=i {
                    a[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            a[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = a[idx(n - 1, j)];
        a[idx(n - 1, j)] = 0.0;
    }
    a[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)` (EISPACK `tql2` layout).
fn ql_implicit(
    z: &mut [f64],
    n: usize,
    d: &mut [f64],
    e: &mut [f64],
    want_vectors: bool,
) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut shift_total = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= f64::EPSILON * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence(MAX_QL_ITERATIONS));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d[l + 2..n].iter_mut() {
                    *di -= h;
                }
                shift_total += h;

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
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if want_vectors {
                        for k in 0..n {
                            let row = k * n;
                            h = z[row + i + 1];
                            z[row + i + 1] = s * z[row + i] + c * h;
                            z[row + i] = c * z[row + i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= f64::EPSILON * tst1 {
                    break;
                }
            }
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }
    Ok(())
}

/// `MᵀM`, upper triangle computed and mirrored so the result is exactly
/// symmetric.
pub fn gram(m: &DenseMatrix) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = (0..m.cols()).map(|j| m.column(j)).collect();
    gram_of_columns(&cols)
}

pub(crate) fn gram_of_columns(cols: &[Vec<f64>]) -> DenseMatrix {
    let n = cols.len();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = dot(&cols[i], &cols[j]);
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    DenseMatrix::from_row_major(n, n, out).expect("gram of valid columns is valid")
}

/// Result of a PSD-aware factorization.
#[derive(Debug, Clone, PartialEq)]
pub enum PsdOutcome {
    /// Upper-triangular `C` with nonnegative diagonal and `CᵀC = B`.
    Factor(DenseMatrix),
    NotPsd {
        smallest_eigenvalue: f64,
    },
}

impl PsdOutcome {
    pub fn factor(&self) -> Option<&DenseMatrix> {
        match self {
            PsdOutcome::Factor(c) => Some(c),
            PsdOutcome::NotPsd { .. } => None,
        }
    }

    pub fn is_psd(&self) -> bool {
        matches!(self, PsdOutcome::Factor(_))
    }
}

/// Factors a symmetric `B` as `CᵀC` when it is PSD up to `tol`.
///
/// Plain Cholesky first. On a nonpositive pivot the eigendecomposition
/// decides: eigenvalues below `-tol` mean `NotPsd`, otherwise the clipped
/// square root `Λ^{1/2}Qᵀ` is re-triangularized by QR.
pub fn cholesky_psd(b: &DenseMatrix, tol: f64) -> Result<PsdOutcome> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(invalid(format!(
            "PSD tolerance must be finite and >= 0, got {tol}"
        )));
    }
    let sym = symmetrized(b)?;
    let n = b.rows();
    if let Some(r) = plain_cholesky_upper(&sym, n) {
        return Ok(PsdOutcome::Factor(DenseMatrix::from_row_major(
            n,
            n,
            positive_zeros(r),
        )?));
    }

    let eig = sym_eigen(b)?;
    let smallest = *eig.values.last().expect("nonempty");
    if smallest < -tol {
        return Ok(PsdOutcome::NotPsd {
            smallest_eigenvalue: smallest,
        });
    }
    // F = Λ^{1/2} Qᵀ, so FᵀF = Q Λ Qᵀ = B.
    let mut f = vec![0.0; n * n];
    for (i, &lambda) in eig.values.iter().enumerate() {
        let root = lambda.max(0.0).sqrt();
        for j in 0..n {
            f[i * n + j] = root * eig.vectors.get(j, i);
        }
    }
    let r = householder_r(f, n);
    Ok(PsdOutcome::Factor(DenseMatrix::from_row_major(
        n,
        n,
        positive_zeros(r),
    )?))
}

/// Maps `-0.0` to `0.0` so that factor files do not depend on the sign of
/// zero inputs.
fn positive_zeros(mut v: Vec<f64>) -> Vec<f64> {
    for x in &mut v {
        *x += 0.0;
    }
    v
}

/// Upper-triangular `R` with `RᵀR = A`, or `None` on a nonpositive pivot.
fn plain_cholesky_upper(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut r = vec![0.0; n * n];
    for j in 0..n {
        let mut pivot = a[j * n + j];
        for k in 0..j {
            pivot -= r[k * n + j] * r[k * n + j];
        }
        if pivot.is_nan() || pivot <= 0.0 {
            return None;
        }
        let rjj = pivot.sqrt();
        r[j * n + j] = rjj;
        for i in j + 1..n {
            let mut s = a[j * n + i];
            for k in 0..j {
                s -= r[k * n + j] * r[k * n + i];
            }
            r[j * n + i] = s / rjj;
        }
    }
    Some(r)
}

/// Triangular factor of a Householder QR of the square row-major `f`, with
/// rows sign-flipped so the diagonal is nonnegative. `RᵀR = FᵀF`.
fn householder_r(mut f: Vec<f64>, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for k in 0..n {
        let norm = (k..n)
            .map(|i| f[i * n + k] * f[i * n + k])
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if f[k * n + k] > 0.0 { -norm } else { norm };
        for i in k..n {
            v[i] = f[i * n + k];
        }
        v[k] -= alpha;
        let vnorm_sq: f64 = v[k..n].iter().map(|x| x * x).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        for j in k..n {
            let mut s = 0.0;
            for i in k..n {
                s += v[i] * f[i * n + j];
            }
            let t = 2.0 * s / vnorm_sq;
            for i in k..n {
                f[i * n + j] -= t * v[i];
            }
        }
        for i in k + 1..n {
            f[i * n + k] = 0.0;
        }
    }
    for i in 0..n {
        if f[i * n + i] < 0.0 {
            for j in i..n {
                f[i * n + j] = -f[i * n + j];
            }
        }
    }
    f
}
