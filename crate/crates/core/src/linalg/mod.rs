//! Dense real linear algebra.
//!
//! Row-major matrices, a Cholesky-based SPD solver, a cyclic Jacobi
//! eigensolver for symmetric matrices, the induced 2-norm, and the
//! orthogonal projector `M(S) = I - A_S (A_S' A_S)^{-1} A_S'`.

mod decomp;
mod eigen;
mod index_set;
pub mod io;

use std::ops::{Index, IndexMut};

use thiserror::Error;

pub use decomp::{cholesky, lu_inverse, solve_spd, Cholesky};
pub use eigen::{operator_norm, sym_eigvals};
pub use index_set::IndexSet;

/// Symmetry tolerance for inputs to the symmetric routines.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("data length mismatch: expected {expected}, got {got}")]
    InvalidData { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (|g[{row},{col}] - g[{col},{row}]| too large)")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("support Gram singular")]
    SingularGram,
    #[error("column index {index} out of range for {cols} columns")]
    IndexOutOfRange { index: usize, cols: usize },
    #[error("empty matrix")]
    Empty,
}

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::InvalidData {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// # Panics
    /// Panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_columns(nrows: usize, columns: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let ncols = columns.len();
        let mut m = Self::zeros(nrows, ncols);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != nrows {
                return Err(LinalgError::InvalidData {
                    expected: nrows,
                    got: col.len(),
                });
            }
            for (i, &v) in col.iter().enumerate() {
                m.data[i * ncols + j] = v;
            }
        }
        Self::new(nrows, ncols, m.data)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
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

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: (self.cols, other.cols),
                got: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
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

    /// `self' * other` without materializing the transpose.
    pub fn tr_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: (self.rows, other.cols),
                got: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let a_row = self.row(k);
            let b_row = other.row(k);
            for (i, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `A' A`, exactly symmetric.
    pub fn gram(&self) -> DenseMatrix {
        let c = self.cols;
        let mut g = Self::zeros(c, c);
        for k in 0..self.rows {
            let r = self.row(k);
            for i in 0..c {
                let a = r[i];
                if a == 0.0 {
                    continue;
                }
                for j in i..c {
                    g.data[i * c + j] += a * r[j];
                }
            }
        }
        for i in 0..c {
            for j in 0..i {
                g.data[i * c + j] = g.data[j * c + i];
            }
        }
        g
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A' x`
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "tr_matvec dimension");
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    /// Inner product of column `j` with `v`.
    pub fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        (0..self.rows).map(|i| self.data[i * self.cols + j] * v[i]).sum()
    }

    /// The `rows × |S|` matrix of the columns in `s`, ascending.
    pub fn submatrix_cols(&self, s: &IndexSet) -> Result<DenseMatrix, LinalgError> {
        if let Some(max) = s.max() {
            if max >= self.cols {
                return Err(LinalgError::IndexOutOfRange {
                    index: max,
                    cols: self.cols,
                });
            }
        }
        let k = s.len();
        let mut out = Self::zeros(self.rows, k);
        for i in 0..self.rows {
            let src = self.row(i);
            for (c, j) in s.iter().enumerate() {
                out.data[i * k + c] = src[j];
            }
        }
        Ok(out)
    }

    /// Principal submatrix on `s` (rows and columns).
    pub fn principal_submatrix(&self, s: &[usize]) -> DenseMatrix {
        let k = s.len();
        let mut out = Self::zeros(k, k);
        for (a, &i) in s.iter().enumerate() {
            for (b, &j) in s.iter().enumerate() {
                out.data[a * k + b] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.shape(),
                got: other.shape(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn check_symmetric(&self) -> Result<(), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let tol = SYMMETRY_TOL * self.max_abs().max(1.0);
        let n = self.rows;
        for i in 0..n {
            for j in 0..i {
                if (self.data[i * n + j] - self.data[j * n + i]).abs() > tol {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `M(S) = I - A_S (A_S' A_S)^{-1} A_S'` as an explicit `n × n` matrix.
pub fn projector(a: &DenseMatrix, s: &IndexSet) -> Result<DenseMatrix, LinalgError> {
    let n = a.rows();
    let mut m = DenseMatrix::identity(n);
    if s.is_empty() {
        return Ok(m);
    }
    let a_s = a.submatrix_cols(s)?;
    let g = a_s.gram();
    let a_s_t = a_s.transpose();
    let z = solve_spd(&g, &a_s_t).map_err(|e| match e {
        LinalgError::NotPositiveDefinite { .. } => LinalgError::SingularGram,
        other => other,
    })?;
    let p = a_s.matmul(&z)?;
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= p[(i, j)];
        }
    }
    // Symmetrize away rounding so M' = M holds exactly.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// `M(S) B` for a column block `B` without forming the `n × n` projector.
pub fn project_out(a: &DenseMatrix, s: &IndexSet, b: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if s.is_empty() {
        return Ok(b.clone());
    }
    let a_s = a.submatrix_cols(s)?;
    let g = a_s.gram();
    let rhs = a_s.tr_matmul(b)?;
    let z = solve_spd(&g, &rhs).map_err(|e| match e {
        LinalgError::NotPositiveDefinite { .. } => LinalgError::SingularGram,
        other => other,
    })?;
    b.sub(&a_s.matmul(&z)?)
}
