#![allow(dead_code)]

use proptest::prelude::*;
use sepsos::linalg::{HermitianMatrix, Matrix};
use sepsos::poly::{ExponentPair, HermitianPolynomial, Poly};
use sepsos::scalar::{GaussRat, C64};

pub fn gauss() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -3i64..=3, 1i64..=3).prop_map(|(a, b, d)| GaussRat::new(sepsos::scalar::rat(a, d), sepsos::scalar::rat(b, d)))
}

pub fn gauss_int() -> impl Strategy<Value = GaussRat> {
    (-2i64..=2, -2i64..=2).prop_map(|(a, b)| GaussRat::complex(a, b))
}

pub fn exponent(nvars: usize, max: u32) -> impl Strategy<Value = ExponentPair> {
    (prop::collection::vec(0..=max, nvars), prop::collection::vec(0..=max, nvars)).prop_map(|(u, v)| ExponentPair::new(u, v))
}

pub fn poly(nvars: usize, max: u32, terms: usize) -> impl Strategy<Value = Poly<GaussRat>> {
    prop::collection::vec((exponent(nvars, max), gauss()), 0..=terms)
        .prop_map(move |ts| Poly::from_terms(nvars, ts).unwrap())
}

/// `g + ḡ`
pub fn hermitian(nvars: usize, max: u32, terms: usize) -> impl Strategy<Value = HermitianPolynomial<GaussRat>> {
    poly(nvars, max, terms).prop_map(|g| HermitianPolynomial::new(g.add(&g.conjugate()).unwrap()).unwrap())
}

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<GaussRat>> {
    prop::collection::vec(gauss(), rows * cols).prop_map(move |d| Matrix::from_vec(rows, cols, d).unwrap())
}

pub fn hermitian_matrix(n: usize) -> impl Strategy<Value = HermitianMatrix<GaussRat>> {
    matrix(n, n).prop_map(|m| HermitianMatrix::new(m.add(&m.adjoint()).unwrap()).unwrap())
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n).prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

pub fn gauss_point(n: usize) -> impl Strategy<Value = Vec<GaussRat>> {
    prop::collection::vec(gauss_int(), n)
}
