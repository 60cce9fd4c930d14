use super::{DenseMatrix, LinalgError};

/// Sweeps stop once the off-diagonal Frobenius mass falls below this
/// fraction of `‖G‖_F`.
const OFF_DIAG_REL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// All eigenvalues of a symmetric matrix in ascending order, by cyclic
/// Jacobi rotations.
pub fn sym_eigvals(g: &DenseMatrix) -> Result<Vec<f64>, LinalgError> {
    g.check_symmetric()?;
    let n = g.rows();
    let mut a: Vec<f64> = g.as_slice().to_vec();
    let total = g.frobenius_norm();
    let target = OFF_DIAG_REL_TOL * total;

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..MAX_SWEEPS {
        if off(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Induced 2-norm `sqrt(λ_max(B'B))`, using the smaller of the two Gram
/// matrices.
pub fn operator_norm(b: &DenseMatrix) -> Result<f64, LinalgError> {
    if b.rows() == 0 || b.cols() == 0 {
        return Err(LinalgError::Empty);
    }
    let g = if b.cols() <= b.rows() {
        b.gram()
    } else {
        b.transpose().gram()
    };
    let eig = sym_eigvals(&g)?;
    Ok(eig.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}
