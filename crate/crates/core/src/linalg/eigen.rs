//! Cyclic Jacobi eigensolvers for small dense symmetric and Hermitian matrices.

use crate::error::Result;
use crate::linalg::matrix::{HermitianMatrix, Matrix};
use crate::scalar::C64;

const MAX_SWEEPS: usize = 50;
const REL_TOL: f64 = 1e-14;

/// Eigen-decomposes a real symmetric matrix given row-major in `a`.
/// Returns unsorted eigenvalues and, if requested, eigenvectors as columns.
fn real_jacobi(a: &mut [f64], n: usize, want_vectors: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut v = want_vectors.then(|| {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    });
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return ((0..n).map(|i| a[i * n + i]).collect(), v);
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off < REL_TOL * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// Ascending eigenvalues of a Hermitian matrix via the real symmetric
/// embedding `[[Re M, -Im M], [Im M, Re M]]`, whose spectrum is that of `M`
/// with every eigenvalue doubled.
pub fn hermitian_eigenvalues(m: &HermitianMatrix<C64>) -> Vec<f64> {
    let n = m.dim();
    let nn = 2 * n;
    let mut a = vec![0.0; nn * nn];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            a[i * nn + j] = z.re;
            a[(i + n) * nn + j + n] = z.re;
            a[i * nn + j + n] = -z.im;
            a[(i + n) * nn + j] = z.im;
        }
    }
    let (mut ev, _) = real_jacobi(&mut a, nn, false);
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

/// Validating wrapper around [`hermitian_eigenvalues`].
pub fn eigenvalues_of(m: &Matrix<C64>) -> Result<Vec<f64>> {
    Ok(hermitian_eigenvalues(&HermitianMatrix::new(m.clone())?))
}

pub fn min_eigenvalue(m: &Matrix<C64>) -> f64 {
    let h = HermitianMatrix::new(m.hermitian_part()).expect("hermitian part");
    hermitian_eigenvalues(&h).first().copied().unwrap_or(0.0)
}

/// Eigenpairs of a real symmetric matrix, ascending, vectors as columns.
pub fn sym_eigh(m: &Matrix<f64>) -> (Vec<f64>, Matrix<f64>) {
    let n = m.rows();
    let mut a: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| 0.5 * (m[(i, j)] + m[(j, i)]))
        .collect();
    let (ev, v) = real_jacobi(&mut a, n, true);
    let v = v.unwrap_or_default();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| ev[i].total_cmp(&ev[j]));
    let vals = order.iter().map(|&i| ev[i]).collect();
    let vecs = Matrix::from_fn(n, n, |r, c| v[r * n + order[c]]);
    (vals, vecs)
}

pub fn sym_eigenvalues(m: &Matrix<f64>) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| 0.5 * (m[(i, j)] + m[(j, i)]))
        .collect();
    let (mut ev, _) = real_jacobi(&mut a, n, false);
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenpairs of a Hermitian matrix by complex Jacobi rotations,
/// ascending, with orthonormal eigenvectors as columns.
pub fn eigh(m: &Matrix<C64>) -> (Vec<f64>, Matrix<C64>) {
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = Matrix::<C64>::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let norm = a.frobenius();
    if norm > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += a[(i, j)].norm_sqr();
                    }
                }
            }
            if off.sqrt() < REL_TOL * norm {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let b = a[(p, q)];
                    let babs = b.norm();
                    if babs == 0.0 {
                        continue;
                    }
                    let phase = b / babs;
                    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * babs);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    // J restricted to (p,q): [[c, s], [-s conj(phase), c conj(phase)]]
                    let jpp = C64::new(c, 0.0);
                    let jpq = C64::new(s, 0.0);
                    let jqp = -phase.conj() * s;
                    let jqq = phase.conj() * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * jpp + akq * jqp;
                        a[(k, q)] = akp * jpq + akq * jqq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                    }
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * jpp + vkq * jqp;
                        v[(k, q)] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
    }
    let ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| ev[i].total_cmp(&ev[j]));
    let vals = order.iter().map(|&i| ev[i]).collect();
    let vecs = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_and_swap() {
        let i2 = Matrix::from_rows(vec![vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(1., 0.)]]).unwrap();
        assert_eq!(eigenvalues_of(&i2).unwrap(), vec![1.0, 1.0]);
        let x = Matrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]).unwrap();
        let ev = eigenvalues_of(&x).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_jacobi_reconstructs() {
        let m = Matrix::from_rows(vec![
            vec![c(2., 0.), c(1., 1.), c(0., -2.)],
            vec![c(1., -1.), c(-1., 0.), c(0.5, 0.)],
            vec![c(0., 2.), c(0.5, 0.), c(3., 0.)],
        ])
        .unwrap();
        let (vals, vecs) = eigh(&m);
        let reference = eigenvalues_of(&m).unwrap();
        for (a, b) in vals.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12);
        }
        let d = Matrix::from_fn(3, 3, |i, j| if i == j { c(vals[i], 0.) } else { c(0., 0.) });
        let back = vecs.mul(&d).unwrap().mul(&vecs.adjoint()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((back[(i, j)] - m[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = Matrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(2., 0.), c(0., 0.)]]).unwrap();
        assert!(eigenvalues_of(&m).is_err());
    }
}
