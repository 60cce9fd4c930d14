use super::{DenseMatrix, LinalgError};

/// Relative pivot threshold below which a matrix is declared not SPD.
pub const SPD_PIVOT_TOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor `G = L L'`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

/// Factors a symmetric positive-definite matrix.
///
/// Only the lower triangle of `g` is read. A pivot `<= 1e-12 * max(diag)`
/// is reported as [`LinalgError::NotPositiveDefinite`] with its index.
pub fn cholesky(g: &DenseMatrix) -> Result<Cholesky, LinalgError> {
    if !g.is_square() {
        return Err(LinalgError::NotSquare {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    let n = g.rows();
    let max_diag = (0..n).fold(0.0f64, |m, i| m.max(g[(i, i)]));
    let threshold = SPD_PIVOT_TOL * max_diag.max(f64::MIN_POSITIVE);
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = g[(j, j)];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > threshold) {
            return Err(LinalgError::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Ok(Cholesky { n, l })
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `G x = b` in place.
    pub fn solve_vec(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve(&self, b: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if b.rows() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: (self.n, b.cols()),
                got: b.shape(),
            });
        }
        let mut out = DenseMatrix::zeros(self.n, b.cols());
        let mut col = vec![0.0; self.n];
        for j in 0..b.cols() {
            for i in 0..self.n {
                col[i] = b[(i, j)];
            }
            self.solve_vec(&mut col);
            for i in 0..self.n {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }

    /// Smallest diagonal entry of `L`.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|i| self.l[i * self.n + i])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves `G X = B` for symmetric positive-definite `G`.
pub fn solve_spd(g: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    g.check_symmetric()?;
    cholesky(g)?.solve(b)
}

/// Inverse of a general square matrix by LU with partial pivoting.
pub fn lu_inverse(a: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut lu: Vec<f64> = a.as_slice().to_vec();
    let mut inv = DenseMatrix::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    // Gauss-Jordan with partial pivoting on the augmented system.
    for col in 0..n {
        let (piv, piv_val) = (col..n)
            .map(|r| (r, lu[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_val <= 1e-14 * scale {
            return Err(LinalgError::Singular);
        }
        if piv != col {
            for k in 0..n {
                lu.swap(col * n + k, piv * n + k);
                let (x, y) = (inv[(col, k)], inv[(piv, k)]);
                inv[(col, k)] = y;
                inv[(piv, k)] = x;
            }
        }
        let d = lu[col * n + col];
        for k in 0..n {
            lu[col * n + k] /= d;
            inv[(col, k)] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = lu[r * n + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                lu[r * n + k] -= f * lu[col * n + k];
                let v = inv[(col, k)];
                inv[(r, k)] -= f * v;
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_inf(g: &DenseMatrix, x: &DenseMatrix, b: &DenseMatrix) -> f64 {
        g.matmul(x).unwrap().max_abs_diff(b)
    }

    #[test]
    fn identity_returns_rhs() {
        let b = DenseMatrix::from_rows(&[vec![1.0, -2.0], vec![3.5, 0.0], vec![0.25, 7.0]]).unwrap();
        let x = solve_spd(&DenseMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_system() {
        let g = DenseMatrix::diag(&[2.0, 4.0]);
        let b = DenseMatrix::from_rows(&[vec![2.0], vec![8.0]]).unwrap();
        let x = solve_spd(&g, &b).unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-15 && (x[(1, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_spd_residual() {
        // R is a fixed pseudo-random 5x5; G = R'R + I.
        let vals: Vec<f64> = (0..25)
            .map(|i| ((i as f64 * 12.9898).sin() * 43758.5453).fract())
            .collect();
        let r = DenseMatrix::new(5, 5, vals).unwrap();
        let mut g = r.gram();
        for i in 0..5 {
            g[(i, i)] += 1.0;
        }
        let b_vals: Vec<f64> = (0..10).map(|i| (i as f64 * 0.7).cos() * 3.0).collect();
        let b = DenseMatrix::new(5, 2, b_vals).unwrap();
        let x = solve_spd(&g, &b).unwrap();
        assert!(residual_inf(&g, &x, &b) <= 1e-9 * (1.0 + b.max_abs()));
    }

    #[test]
    fn non_spd_reports_pivot() {
        let g = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let err = solve_spd(&g, &DenseMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, LinalgError::NotPositiveDefinite { pivot: 1, .. }));

        let semi = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            cholesky(&semi),
            Err(LinalgError::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn asymmetric_rejected() {
        let g = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        assert!(matches!(
            solve_spd(&g, &DenseMatrix::identity(2)),
            Err(LinalgError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn lu_inverse_roundtrip() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, -1.0, 3.0], vec![4.0, 0.5, -2.0]]).unwrap();
        let inv = lu_inverse(&a).unwrap();
        assert!(a.matmul(&inv).unwrap().max_abs_diff(&DenseMatrix::identity(3)) < 1e-13);
        let sing = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(lu_inverse(&sing).unwrap_err(), LinalgError::Singular);
    }
}
