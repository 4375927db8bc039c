//! Small dense matrices over a [`Scalar`] plus the two linear-algebra kernels:
//! exact elimination (rational mode) and SVD/eigen based routines (float mode).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::scalar::{max_abs, Scalar, RANK_RTOL};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Matrix {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        let cols = columns.len();
        assert!(
            columns.iter().all(|c| c.len() == rows),
            "column length mismatch"
        );
        Self::from_fn(rows, cols, |i, j| columns[j][i].clone())
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mul_ref(c)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &a.mul_ref(b);
                    }
                }
                acc
            })
            .collect()
    }

    /// `vᵀ · self · w`.
    pub fn bilinear(&self, v: &[S], w: &[S]) -> S {
        let mw = self.mul_vec(w);
        v.iter()
            .zip(&mw)
            .fold(S::zero(), |acc, (a, b)| acc + &a.mul_ref(b))
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    /// `max |self - other|` entrywise, as `f64`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b).to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_negligible(tol)))
    }

    pub fn diagonal_entries(&self) -> Vec<S> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn rank(&self, tol: f64) -> usize {
        S::rank(self, tol)
    }

    pub fn pseudo_inverse(&self, tol: f64) -> Self {
        S::pseudo_inverse(self, tol)
    }

    pub fn kernel(&self, tol: f64) -> Vec<Vec<S>> {
        S::kernel(self, tol)
    }

    /// Rank, pseudo-inverse and kernel specialised to symmetric positive
    /// semidefinite input. Float mode works on the unit-diagonal rescaling, so
    /// the rank decision does not depend on how the diagonal is scaled.
    pub fn psd_rank(&self, tol: f64) -> usize {
        S::psd_rank(self, tol)
    }

    pub fn psd_pseudo_inverse(&self, tol: f64) -> Self {
        S::psd_pseudo_inverse(self, tol)
    }

    pub fn psd_kernel(&self, tol: f64) -> Vec<Vec<S>> {
        S::psd_kernel(self, tol)
    }

    /// Exact inverse for rationals, partial-pivoting Gauss–Jordan for floats.
    /// `None` when singular (pivot below `tol` in float mode).
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        exact::inverse(self, tol)
    }
}

impl<S: Scalar> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;

    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &a.mul_ref(b);
                    }
                }
            }
        }
        out
    }
}

impl<S: Scalar> Add for &Matrix<S> {
    type Output = Matrix<S>;

    fn add(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for &Matrix<S> {
    type Output = Matrix<S>;

    fn sub(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b)
                .collect(),
        }
    }
}

impl<S: fmt::Display> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.data[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|x| x.to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Elimination-based routines. Exact for rationals; for floats they pivot on
/// the largest entry and treat `|x| <= tol` as zero.
pub mod exact {
    use super::*;

    /// Reduced row echelon form and pivot columns.
    pub fn rref<S: Scalar>(m: &Matrix<S>, tol: f64) -> (Matrix<S>, Vec<usize>) {
        let mut a = m.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let best = (row..a.rows)
                .filter(|&i| !a[(i, col)].is_negligible(tol))
                .max_by(|&i, &j| {
                    a[(i, col)]
                        .abs()
                        .partial_cmp(&a[(j, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            let Some(p) = best else { continue };
            if p != row {
                for j in 0..a.cols {
                    a.data.swap(p * a.cols + j, row * a.cols + j);
                }
            }
            let inv = S::one() / &a[(row, col)];
            for j in col..a.cols {
                a[(row, j)] *= &inv;
            }
            for i in 0..a.rows {
                if i == row || a[(i, col)].is_zero() {
                    continue;
                }
                let factor = a[(i, col)].clone();
                for j in col..a.cols {
                    let delta = factor.mul_ref(&a[(row, j)]);
                    a[(i, j)] -= &delta;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    pub fn rank<S: Scalar>(m: &Matrix<S>) -> usize {
        rref(m, 0.0).1.len()
    }

    pub fn inverse<S: Scalar>(m: &Matrix<S>, tol: f64) -> Option<Matrix<S>> {
        if !m.is_square() {
            return None;
        }
        let n = m.rows;
        let augmented = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                m[(i, j)].clone()
            } else if j - n == i {
                S::one()
            } else {
                S::zero()
            }
        });
        let (r, pivots) = rref(&augmented, tol);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    /// Moore–Penrose pseudo-inverse through the full-rank factorization
    /// `M = B·C` (B = pivot columns of M, C = nonzero rows of rref(M)):
    /// `M⁺ = Cᵀ (C Cᵀ)⁻¹ (Bᵀ B)⁻¹ Bᵀ`.
    pub fn pseudo_inverse<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
        let (r, pivots) = rref(m, 0.0);
        let k = pivots.len();
        if k == 0 {
            return Matrix::zeros(m.cols, m.rows);
        }
        let b = Matrix::from_fn(m.rows, k, |i, j| m[(i, pivots[j])].clone());
        let c = Matrix::from_fn(k, m.cols, |i, j| r[(i, j)].clone());
        let bt = b.transpose();
        let ct = c.transpose();
        let btb_inv = inverse(&(&bt * &b), 0.0).expect("BᵀB has full rank");
        let cct_inv = inverse(&(&c * &ct), 0.0).expect("CCᵀ has full rank");
        let left = &ct * &cct_inv;
        let right = &btb_inv * &bt;
        &left * &right
    }

    pub fn kernel<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<S>> {
        kernel_tol(m, 0.0)
    }

    pub(crate) fn kernel_tol<S: Scalar>(m: &Matrix<S>, tol: f64) -> Vec<Vec<S>> {
        let (r, pivots) = rref(m, tol);
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); m.cols];
                v[f] = S::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Symmetric elimination with diagonal pivots. A negative pivot, or a
    /// zero pivot with a nonzero entry in its row, witnesses a non-PSD matrix.
    pub fn psd_violation<S: Scalar>(m: &Matrix<S>) -> Option<String> {
        if !m.is_square() {
            return Some("matrix is not square".into());
        }
        let n = m.rows;
        for i in 0..n {
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Some(format!("not symmetric at ({i}, {j})"));
                }
            }
        }
        let mut a = m.clone();
        for k in 0..n {
            let pivot = a[(k, k)].clone();
            if pivot.is_negative() {
                return Some(format!("negative pivot {pivot} at principal index {k}"));
            }
            if pivot.is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                    return Some(format!(
                        "2x2 principal minor on indices ({k}, {j}) is negative"
                    ));
                }
                continue;
            }
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let factor = a[(i, k)].clone() / &pivot;
                for j in k + 1..n {
                    let delta = factor.mul_ref(&a[(k, j)]);
                    a[(i, j)] -= &delta;
                }
            }
        }
        None
    }
}

/// Float-mode routines backed by nalgebra's SVD and symmetric eigensolver.
/// A singular value counts as nonzero when it exceeds
/// `max(RANK_RTOL * σ_max, tol)`.
pub mod spectral {
    use super::*;
    use nalgebra::DMatrix;

    fn to_na(m: &Matrix<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(m.rows, m.cols, &m.data)
    }

    fn from_na(m: &DMatrix<f64>) -> Matrix<f64> {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    fn threshold(singular: &[f64], tol: f64) -> f64 {
        let smax = singular.iter().copied().fold(0.0, f64::max);
        (RANK_RTOL * smax).max(tol)
    }

    pub fn rank(m: &Matrix<f64>, tol: f64) -> usize {
        if m.rows == 0 || m.cols == 0 {
            return 0;
        }
        let svd = to_na(m).svd(false, false);
        let s: Vec<f64> = svd.singular_values.iter().copied().collect();
        let t = threshold(&s, tol);
        s.iter().filter(|&&x| x > t).count()
    }

    pub fn pseudo_inverse(m: &Matrix<f64>, tol: f64) -> Matrix<f64> {
        if m.rows == 0 || m.cols == 0 {
            return Matrix::zeros(m.cols, m.rows);
        }
        let svd = to_na(m).svd(true, true);
        let s: Vec<f64> = svd.singular_values.iter().copied().collect();
        let t = threshold(&s, tol);
        let u = svd.u.as_ref().expect("u requested");
        let vt = svd.v_t.as_ref().expect("v_t requested");
        let mut out = DMatrix::<f64>::zeros(m.cols, m.rows);
        for (k, &sigma) in s.iter().enumerate() {
            if sigma > t {
                out += (vt.row(k).transpose() * u.column(k).transpose()) / sigma;
            }
        }
        from_na(&out)
    }

    pub fn kernel(m: &Matrix<f64>, tol: f64) -> Vec<Vec<f64>> {
        if m.cols == 0 {
            return Vec::new();
        }
        // Pad to at least square so the SVD exposes every right singular vector.
        let rows = m.rows.max(m.cols);
        let padded = Matrix::from_fn(
            rows,
            m.cols,
            |i, j| if i < m.rows { m[(i, j)] } else { 0.0 },
        );
        let svd = to_na(&padded).svd(false, true);
        let s: Vec<f64> = svd.singular_values.iter().copied().collect();
        let t = threshold(&s, tol);
        let vt = svd.v_t.as_ref().expect("v_t requested");
        s.iter()
            .enumerate()
            .filter(|(_, &sigma)| sigma <= t)
            .map(|(k, _)| vt.row(k).iter().copied().collect())
            .collect()
    }

    /// `D^{-1/2} m D^{-1/2}` with `D = diag(m)` and the scale factors
    /// `D^{-1/2}`. Diagonal entries below the usual rank threshold (relative
    /// to the largest diagonal entry) count as zero: their rows and columns are
    /// zeroed and keep scale 1.
    fn equilibrate(m: &Matrix<f64>, tol: f64) -> (Matrix<f64>, Vec<f64>) {
        let diag: Vec<f64> = (0..m.rows).map(|i| m[(i, i)]).collect();
        let t = threshold(&diag, tol);
        let s: Vec<Option<f64>> = diag
            .iter()
            .map(|&g| (g > t).then(|| 1.0 / g.sqrt()))
            .collect();
        let scaled = Matrix::from_fn(m.rows, m.cols, |i, j| match (s[i], s[j]) {
            (Some(a), Some(b)) => a * m[(i, j)] * b,
            _ => 0.0,
        });
        (scaled, s.into_iter().map(|x| x.unwrap_or(1.0)).collect())
    }

    pub fn psd_rank(m: &Matrix<f64>, tol: f64) -> usize {
        rank(&equilibrate(m, tol).0, tol)
    }

    pub fn psd_pseudo_inverse(m: &Matrix<f64>, tol: f64) -> Matrix<f64> {
        if m.rows == 0 {
            return Matrix::zeros(0, 0);
        }
        let (scaled, s) = equilibrate(m, tol);
        let svd = to_na(&scaled).svd(true, true);
        let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        let t = threshold(&sv, tol);
        let r = sv.iter().filter(|&&x| x > t).count();
        if r == m.rows {
            // invertible: pinv(m) = S pinv(scaled) S holds exactly
            let inv = from_na(&svd.pseudo_inverse(0.0).expect("svd with u and v"));
            return Matrix::from_fn(m.rows, m.cols, |i, j| s[i] * inv[(i, j)] * s[j]);
        }
        // singular: keep the leading `r` singular triplets of `m` itself
        let full = to_na(m).svd(true, true);
        let u = full.u.as_ref().expect("u requested");
        let vt = full.v_t.as_ref().expect("v_t requested");
        let mut order: Vec<usize> = (0..full.singular_values.len()).collect();
        order.sort_by(|&a, &b| full.singular_values[b].total_cmp(&full.singular_values[a]));
        let mut out = DMatrix::<f64>::zeros(m.cols, m.rows);
        for &k in order.iter().take(r) {
            out += (vt.row(k).transpose() * u.column(k).transpose()) / full.singular_values[k];
        }
        from_na(&out)
    }

    pub fn psd_kernel(m: &Matrix<f64>, tol: f64) -> Vec<Vec<f64>> {
        let (scaled, s) = equilibrate(m, tol);
        kernel(&scaled, tol)
            .into_iter()
            .map(|u| u.iter().zip(&s).map(|(x, si)| x * si).collect())
            .collect()
    }

    pub fn psd_violation(m: &Matrix<f64>, tol: f64) -> Option<String> {
        if !m.is_square() {
            return Some("matrix is not square".into());
        }
        if m.rows == 0 {
            return None;
        }
        let scale = m.max_abs().max(1.0);
        for i in 0..m.rows {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > tol * scale {
                    return Some(format!("not symmetric at ({i}, {j})"));
                }
            }
        }
        let eig = to_na(m).symmetric_eigen();
        let (idx, lambda) =
            eig.eigenvalues
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |best, (i, l)| if l < best.1 { (i, l) } else { best },
                );
        if lambda < -tol * scale {
            Some(format!("eigenvalue {lambda:e} (index {idx}) is negative"))
        } else {
            None
        }
    }
}
