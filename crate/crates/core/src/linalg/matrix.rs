use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Scalar, C64};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
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

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<K: Scalar> Matrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, K::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { K::one() } else { K::zero() })
    }

    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m[(i, j)] = K::one();
        m
    }

    pub fn adjoint(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    pub fn scale(&self, s: &K) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.negate())
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect(),
        })
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Matrix::<K>::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(i, j)] = out[(i, j)].plus(&a.times(b));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[K]) -> Result<Vec<K>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(K::zero(), |acc, (a, b)| acc.plus(&a.times(b)))
            })
            .collect())
    }

    /// `v† M v` without the realness check.
    pub fn quadratic_form(&self, v: &[K]) -> Result<K> {
        let mv = self.mul_vec(v)?;
        Ok(v
            .iter()
            .zip(&mv)
            .fold(K::zero(), |acc, (a, b)| acc.plus(&a.conj().times(b))))
    }

    pub fn kron(&self, o: &Self) -> Self {
        Matrix::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            self[(i / o.rows, j / o.cols)].times(&o[(i % o.rows, j % o.cols)])
        })
    }

    pub fn trace(&self) -> K {
        (0..self.rows.min(self.cols)).fold(K::zero(), |acc, i| acc.plus(&self[(i, i)]))
    }

    pub fn to_c64(&self) -> Matrix<C64> {
        self.map(|x| x.to_c64())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (i..self.cols).all(|j| self[(i, j)].approx_eq(&self[(j, i)].conj(), tol))
            })
    }
}

impl Matrix<C64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermitian_part(&self) -> Matrix<C64> {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Real part of the Frobenius inner product `tr(A† B)`.
    pub fn inner(&self, o: &Matrix<C64>) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }
}

impl Matrix<GaussRat> {
    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }
}

/// Square matrix with `M[j][i] = conj(M[i][j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<K>(Matrix<K>);

/// Entrywise tolerance for accepting floating input as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

impl<K: Scalar> HermitianMatrix<K> {
    /// Validates Hermitian symmetry: exactly for exact scalars, within
    /// [`HERMITIAN_TOL`] (then symmetrized) for floating ones.
    pub fn new(m: Matrix<K>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "{}x{} is not square",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        for i in 0..n {
            for j in i..n {
                if !m[(i, j)].approx_eq(&m[(j, i)].conj(), HERMITIAN_TOL) {
                    return Err(Error::NotHermitian(format!("entry ({i},{j})")));
                }
            }
        }
        let sym = Matrix::from_fn(n, n, |i, j| {
            if i <= j {
                m[(i, j)].clone()
            } else {
                m[(j, i)].conj()
            }
        });
        let sym = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                let d = &sym[(i, i)];
                // drop any imaginary part on the diagonal
                d.plus(&d.conj()).times(&K::from_ratio(1, 2))
            } else {
                sym[(i, j)].clone()
            }
        });
        Ok(HermitianMatrix(sym))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix<K> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<K> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> &K {
        &self.0[(i, j)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_and_kron() {
        let a = Matrix::<GaussRat>::from_rows(vec![
            vec![GaussRat::int(1), GaussRat::int(2)],
            vec![GaussRat::int(3), GaussRat::int(4)],
        ])
        .unwrap();
        let i2 = Matrix::<GaussRat>::identity(2);
        assert_eq!(a.mul(&i2).unwrap(), a);
        let k = i2.kron(&a);
        assert_eq!(k.rows(), 4);
        assert_eq!(k[(3, 2)], GaussRat::int(3));
        assert_eq!(k[(0, 2)], GaussRat::int(0));
    }

    #[test]
    fn hermitian_validation() {
        let bad = Matrix::<GaussRat>::from_rows(vec![
            vec![GaussRat::int(1), GaussRat::complex(0, 1)],
            vec![GaussRat::complex(0, 1), GaussRat::int(1)],
        ])
        .unwrap();
        assert!(HermitianMatrix::new(bad).is_err());
        let good = Matrix::<C64>::from_rows(vec![
            vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, -1.0 + 1e-14), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianMatrix::new(good).unwrap();
        assert_eq!(h.get(1, 0).im, -1.0);
        assert!(HermitianMatrix::new(Matrix::<C64>::zeros(2, 3)).is_err());
    }
}
