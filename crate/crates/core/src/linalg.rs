//! Dense real matrix kernels.
//!
//! [`Matrix`] is a small row-major matrix type. Schatten powers are computed
//! from singular values (or eigenvalues, for symmetric input); the literal
//! trace path `tr((AᵀA)^t)` is kept in [`trace_power_schatten`] as an
//! independent reference.
//!
//! ```
//! use polymat::linalg::{schatten_power, Matrix};
//! let a = Matrix::diag(&[3.0, 4.0]);
//! assert!((schatten_power(&a, 2).unwrap() - 25.0).abs() < 1e-12);
//! ```

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute tolerance on `max |A - Aᵀ|` under which a matrix is routed to the
/// symmetric eigensolver.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Singular values below `SINGULAR_CUTOFF * σ_max` are treated as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

/// Dense real matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data, rejecting empty shapes and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Input(format!("matrix shape {rows}x{cols} is empty")));
        }
        if data.len() != rows * cols {
            return Err(Error::Input(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|row| row.len() != c) {
            return Err(Error::Input(format!(
                "row {bad} has {} entries, expected {c}",
                rows[bad].len()
            )));
        }
        Matrix::new(r, c, rows.concat())
    }

    /// # Panics
    /// Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Matrix with a single unit entry at `(i, j)`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        m[(i, j)] = 1.0;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.cols, other.cols),
                got: other.shape(),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `AᵀA`, always symmetric by construction.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in i..n {
                    g.data[i * n + j] += ri * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, other: &Matrix, alpha: f64) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.shape(),
                got: other.shape(),
            });
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let n = self.rows;
        (0..n)
            .all(|i| (i + 1..n).all(|j| (self.data[i * n + j] - self.data[j * n + i]).abs() <= tol))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.data.chunks(self.cols)).finish()
    }
}

// Serialized as a list of rows, matching the PolyMatrix JSON schema.
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

fn check_two_t(two_t: u32) -> Result<u32> {
    if two_t < 2 || !two_t.is_multiple_of(2) {
        return Err(Error::param(format!(
            "Schatten exponent must be an even integer >= 2, got {two_t}"
        )));
    }
    Ok(two_t / 2)
}

fn check_finite(a: &Matrix) -> Result<()> {
    if a.is_finite() {
        Ok(())
    } else {
        Err(Error::Input("matrix has non-finite entries".into()))
    }
}

/// Eigenvalues of a symmetric matrix, ascending. Only the upper triangle is
/// trusted to be consistent; the caller guarantees symmetry.
pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    assert_eq!(
        a.rows, a.cols,
        "symmetric_eigenvalues needs a square matrix"
    );
    let mut ev: Vec<f64> = a
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values, descending.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let mut sv: Vec<f64> = if a.is_symmetric(SYMMETRY_TOL) {
        symmetric_eigenvalues(a).into_iter().map(f64::abs).collect()
    } else {
        a.to_nalgebra().singular_values().iter().copied().collect()
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Applies the relative cutoff and returns the retained singular values.
fn significant(sv: Vec<f64>) -> Vec<f64> {
    let max = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    if max == 0.0 {
        return Vec::new();
    }
    sv.into_iter()
        .filter(|&s| s >= SINGULAR_CUTOFF * max)
        .collect()
}

/// `log Σ_j s_j^p` computed stably; `-inf` for an empty or all-zero list.
pub(crate) fn log_power_sum(values: &[f64], p: f64) -> f64 {
    let max = values.iter().fold(0.0f64, |m, &s| m.max(s.abs()));
    if max == 0.0 {
        return f64::NEG_INFINITY;
    }
    let scaled: f64 = values.iter().map(|&s| (s.abs() / max).powf(p)).sum();
    p * max.ln() + scaled.ln()
}

/// `‖A‖_{2t}^{2t} = tr(AᵀA)^t = Σ_j σ_j^{2t}`.
pub fn schatten_power(a: &Matrix, two_t: u32) -> Result<f64> {
    check_two_t(two_t)?;
    check_finite(a)?;
    let sv = significant(singular_values(a));
    Ok(sv.iter().map(|s| s.powi(two_t as i32)).sum())
}

/// Natural log of [`schatten_power`], safe against overflow for large `t`.
pub fn log_schatten_power(a: &Matrix, two_t: u32) -> Result<f64> {
    check_two_t(two_t)?;
    check_finite(a)?;
    let sv = significant(singular_values(a));
    Ok(log_power_sum(&sv, f64::from(two_t)))
}

/// `‖A‖_{2t} = (tr(AᵀA)^t)^{1/2t}`.
pub fn schatten_norm(a: &Matrix, two_t: u32) -> Result<f64> {
    let lp = log_schatten_power(a, two_t)?;
    Ok((lp / f64::from(two_t)).exp())
}

/// Spectral norm `σ_max(A)`.
pub fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Literal `tr((AᵀA)^t)` by repeated squaring of the smaller Gram matrix.
/// Reference path for checking [`schatten_power`].
pub fn trace_power_schatten(a: &Matrix, two_t: u32) -> Result<f64> {
    let t = check_two_t(two_t)?;
    check_finite(a)?;
    let g = if a.rows < a.cols {
        a.transpose().gram()
    } else {
        a.gram()
    };
    let mut result: Option<Matrix> = None;
    let mut base = g;
    let mut e = t;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.matmul(&base)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.matmul(&base)?;
    }
    Ok(result.map_or(0.0, |r| r.trace()))
}

/// `H(A) = [[0, A], [Aᵀ, 0]]`.
pub fn hermitian_dilation(a: &Matrix) -> Matrix {
    let (r, c) = a.shape();
    let mut h = Matrix::zeros(r + c, r + c);
    for i in 0..r {
        for j in 0..c {
            let v = a[(i, j)];
            h[(i, r + j)] = v;
            h[(r + j, i)] = v;
        }
    }
    h
}

/// `|A| = (AᵀA)^{1/2}`, the PSD square root of the Gram matrix.
pub fn matrix_abs(a: &Matrix) -> Matrix {
    let g = a.gram();
    let eig = g.to_nalgebra().symmetric_eigen();
    let vecs = &eig.eigenvectors;
    let roots: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let n = g.rows;
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..n).map(|k| vecs[(i, k)] * roots[k] * vecs[(j, k)]).sum();
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}
