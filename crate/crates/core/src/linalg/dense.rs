//! Floating-point factorizations used by the interior-point solver.

use crate::linalg::matrix::Matrix;
use crate::scalar::C64;

/// Lower-triangular `L` with `M = L L†`, or `None` if `M` is not numerically
/// positive definite.
pub fn cholesky(m: &Matrix<C64>) -> Option<Matrix<C64>> {
    let n = m.rows();
    let mut l = Matrix::filled(n, n, C64::new(0.0, 0.0));
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L X = B` for lower-triangular `L`.
pub fn lower_solve(l: &Matrix<C64>, b: &Matrix<C64>) -> Matrix<C64> {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Solves `L† X = B` for lower-triangular `L`.
pub fn lower_adjoint_solve(l: &Matrix<C64>, b: &Matrix<C64>) -> Matrix<C64> {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)].conj();
        }
    }
    x
}

/// Inverse of a Hermitian positive definite matrix from its Cholesky factor.
pub fn inverse_from_cholesky(l: &Matrix<C64>) -> Matrix<C64> {
    let n = l.rows();
    let eye = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let y = lower_solve(l, &eye);
    lower_adjoint_solve(l, &y).hermitian_part()
}

/// Real Cholesky `M = L Lᵀ` of a symmetric positive definite matrix.
pub fn real_cholesky(m: &Matrix<f64>) -> Option<Matrix<f64>> {
    let n = m.rows();
    let mut l = Matrix::filled(n, n, 0.0);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b`.
pub fn real_cholesky_solve(l: &Matrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// Solves a dense real system by Gaussian elimination with partial pivoting.
pub fn real_solve(m: &Matrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = m.rows();
    let mut a = m.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))?;
        if a[(piv, col)].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            x.swap(col, piv);
        }
        for i in col + 1..n {
            let f = a[(i, col)] / a[(col, col)];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[(i, j)] -= f * a[(col, j)];
            }
            x[i] -= f * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= a[(i, j)] * x[j];
        }
        x[i] = s / a[(i, i)];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_inverse() {
        let m = Matrix::from_rows(vec![
            vec![C64::new(4.0, 0.0), C64::new(1.0, 1.0)],
            vec![C64::new(1.0, -1.0), C64::new(3.0, 0.0)],
        ])
        .unwrap();
        let l = cholesky(&m).unwrap();
        let inv = inverse_from_cholesky(&l);
        let id = m.mul(&inv).unwrap();
        assert!((id[(0, 0)] - 1.0).norm() < 1e-14);
        assert!(id[(0, 1)].norm() < 1e-14);
        let neg = Matrix::from_rows(vec![vec![C64::new(-1.0, 0.0)]]).unwrap();
        assert!(cholesky(&neg).is_none());
    }

    #[test]
    fn real_solvers() {
        let m = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let l = real_cholesky(&m).unwrap();
        let x = real_cholesky_solve(&l, &[3.0, 5.0]);
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        let y = real_solve(&m, &[3.0, 5.0]).unwrap();
        assert!((y[0] - 0.8).abs() < 1e-14);
    }
}
