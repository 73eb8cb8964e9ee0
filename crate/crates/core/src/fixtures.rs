//! Named exact fixtures: the Choi polynomial, the Ha-Kye map and its
//! dehomogenizations, the zero curve and the block certificate for `q`.

use crate::choi::{MatrixMap, Orientation};
use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, Matrix};
use crate::poly::{ExponentPair, HermitianPolynomial, Poly};
use crate::scalar::GaussRat;
use crate::sos::{GramBasis, GramCertificate};
use crate::zeros::ZeroCurve;

type G = GaussRat;

pub const FIXTURE_NAMES: [&str; 12] = [
    "choi-polynomial",
    "choi-dehom",
    "hakye-map",
    "hakye-w",
    "appendix-p",
    "appendix-q",
    "zero-curve",
    "cert-a",
    "cert-b",
    "cert-monomials",
    "appendix-q-certificate",
    "bell-state",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Fixture {
    Polynomial(HermitianPolynomial<G>),
    Map(MatrixMap<G>),
    Curve(ZeroCurve),
    Matrix(Matrix<G>),
    Monomials { names: Vec<String>, monomials: Vec<ExponentPair> },
    Certificate { names: Vec<String>, cert: GramCertificate<G> },
    State(HermitianMatrix<G>),
}

/// Accepts `choi_polynomial`, `Choi-Polynomial` and so on.
pub fn canonical_name(name: &str) -> String {
    name.trim().to_ascii_lowercase().replace('_', "-")
}

pub fn fixture(name: &str) -> Result<Fixture> {
    Ok(match canonical_name(name).as_str() {
        "choi-polynomial" => Fixture::Polynomial(choi_polynomial()),
        "choi-dehom" => Fixture::Polynomial(choi_dehom()),
        "hakye-map" => Fixture::Map(hakye_map()),
        "hakye-w" => Fixture::Polynomial(hakye_w()),
        "appendix-p" => Fixture::Polynomial(appendix_p()),
        "appendix-q" => Fixture::Polynomial(appendix_q()),
        "zero-curve" => Fixture::Curve(zero_curve()),
        "cert-a" => Fixture::Matrix(cert_a()),
        "cert-b" => Fixture::Matrix(cert_b()),
        "cert-monomials" => Fixture::Monomials {
            names: appendix_q_names(),
            monomials: cert_monomials(),
        },
        "appendix-q-certificate" => Fixture::Certificate {
            names: appendix_q_names(),
            cert: appendix_q_certificate(),
        },
        "bell-state" => Fixture::State(bell_state()),
        _ => return Err(Error::UnknownFixture(name.to_string())),
    })
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn term(n: usize, u: &[(usize, u32)], v: &[(usize, u32)]) -> ExponentPair {
    let mut e = ExponentPair::one(n);
    for &(i, k) in u {
        e.u[i] += k;
    }
    for &(i, k) in v {
        e.v[i] += k;
    }
    e
}

/// `Σ|x_i|²|y_i|² − 2Σ Re[x_i x̄_j y_i ȳ_j] + 2(|x₁|²|y₂|² + |x₂|²|y₃|² + |x₃|²|y₁|²)`
/// over `(x₁, x₂, x₃, y₁, y₂, y₃)`.
pub fn choi_polynomial() -> HermitianPolynomial<G> {
    let n = 6;
    let (x, y) = (|i: usize| i, |i: usize| 3 + i);
    let mut p = Poly::zero(n);
    for i in 0..3 {
        p.add_term(term(n, &[(x(i), 1), (y(i), 1)], &[(x(i), 1), (y(i), 1)]), G::int(1));
    }
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        // 2 Re[w] = w + w̄
        p.add_term(term(n, &[(x(i), 1), (y(i), 1)], &[(x(j), 1), (y(j), 1)]), G::int(-1));
        p.add_term(term(n, &[(x(j), 1), (y(j), 1)], &[(x(i), 1), (y(i), 1)]), G::int(-1));
    }
    for (i, k) in [(0, 1), (1, 2), (2, 0)] {
        p.add_term(term(n, &[(x(i), 1), (y(k), 1)], &[(x(i), 1), (y(k), 1)]), G::int(2));
    }
    let (nm, blocks) = crate::choi::biquadratic_layout(Orientation::InputFirst, 3, 3);
    let p = p.with_names(nm).expect("six names").with_blocks(blocks).expect("blocks");
    HermitianPolynomial::new(p).expect("Hermitian")
}

/// `p̂(x₁, x₂, y₁, y₂) = p(x₁, x₂, 1, y₁, y₂, 1)`.
pub fn choi_dehom() -> HermitianPolynomial<G> {
    choi_polynomial()
        .dehomogenize_named(&[("x3", G::int(1)), ("y3", G::int(1))])
        .expect("x3 and y3 exist")
}

/// Image of `[[x, y], [z, w]]` under the Ha-Kye map `M₂ → M₄`.
pub fn hakye_image(x: &G, y: &G, z: &G, w: &G) -> Matrix<G> {
    let c = |k: i64| G::int(k);
    let zero = c(0);
    let lin = |terms: &[(i64, &G)]| terms.iter().fold(G::int(0), |acc, (k, v)| &acc + &(&c(*k) * *v));
    Matrix::from_rows(vec![
        vec![lin(&[(3, w), (4, x), (-2, y), (-2, z)]), lin(&[(2, z), (-2, x)]), zero.clone(), zero.clone()],
        vec![lin(&[(2, y), (-2, x)]), lin(&[(2, x)]), z.clone(), zero.clone()],
        vec![zero.clone(), y.clone(), lin(&[(2, w)]), lin(&[(-1, w), (-2, z)])],
        vec![zero.clone(), zero.clone(), lin(&[(-1, w), (-2, y)]), lin(&[(2, w), (4, x)])],
    ])
    .expect("4x4")
}

pub fn hakye_map() -> MatrixMap<G> {
    MatrixMap::from_fn(2, 4, |m| hakye_image(&m[(0, 0)], &m[(0, 1)], &m[(1, 0)], &m[(1, 1)])).expect("Hermitian preserving")
}

/// `W(x, y) = x† Φ(y y†) x` over `(x₁, …, x₄, y₁, y₂)`.
pub fn hakye_w() -> HermitianPolynomial<G> {
    hakye_map().map_to_biquadratic(Orientation::OutputFirst)
}

fn rename_last_alpha(p: HermitianPolynomial<G>) -> HermitianPolynomial<G> {
    let mut nm = p.poly().names().to_vec();
    if let Some(last) = nm.last_mut() {
        *last = "alpha".into();
    }
    HermitianPolynomial::new(p.into_poly().with_names(nm).expect("same count")).expect("Hermitian")
}

/// `W(1, x₂, x₃, x₄, 1, α)` over `(x₂, x₃, x₄, α)`.
pub fn appendix_p() -> HermitianPolynomial<G> {
    rename_last_alpha(
        hakye_w()
            .dehomogenize_named(&[("x1", G::int(1)), ("y1", G::int(1))])
            .expect("x1 and y1 exist"),
    )
}

/// `W(x₁, x₂, −6, x₄, 1, α)` over `(x₁, x₂, x₄, α)`.
pub fn appendix_q() -> HermitianPolynomial<G> {
    rename_last_alpha(
        hakye_w()
            .dehomogenize_named(&[("x3", G::int(-6)), ("y1", G::int(1))])
            .expect("x3 and y1 exist"),
    )
}

/// `1, α, x₂, x₄, αx₃, αx₄, ᾱx₃, ᾱx₄` and conjugates, over `(x₂, x₃, x₄, α)`.
pub fn appendix_basis() -> GramBasis {
    let n = 4;
    let (x2, x3, x4, al) = (0, 1, 2, 3);
    let half = vec![
        ExponentPair::one(n),
        term(n, &[(al, 1)], &[]),
        term(n, &[(x2, 1)], &[]),
        term(n, &[(x4, 1)], &[]),
        term(n, &[(al, 1), (x3, 1)], &[]),
        term(n, &[(al, 1), (x4, 1)], &[]),
        term(n, &[(x3, 1)], &[(al, 1)]),
        term(n, &[(x4, 1)], &[(al, 1)]),
    ];
    GramBasis::closure(n, &half).expect("distinct monomials")
}

pub fn appendix_q_names() -> Vec<String> {
    names(&["x1", "x2", "x4", "alpha"])
}

/// `x(α) = (2α(1−α), α(4 − 2(α+ᾱ) + 3|α|²), −4 − 2|α|², −ᾱ(2+α))`, with
/// `y = (1, α)`; the first component clears denominators.
pub fn zero_curve() -> ZeroCurve {
    let a = |u: u32, v: u32, c: i64| (ExponentPair::new(vec![u], vec![v]), G::int(c));
    let poly = |t: Vec<(ExponentPair, G)>| {
        Poly::from_terms(1, t)
            .expect("one variable")
            .with_names(vec!["alpha".into()])
            .expect("one name")
    };
    let components = vec![
        poly(vec![a(1, 0, 2), a(2, 0, -2)]),
        poly(vec![a(1, 0, 4), a(2, 0, -2), a(1, 1, -2), a(2, 1, 3)]),
        poly(vec![a(0, 0, -4), a(1, 1, -2)]),
        poly(vec![a(0, 1, -2), a(1, 1, -1)]),
        poly(vec![a(0, 0, 1)]),
        poly(vec![a(1, 0, 1)]),
    ];
    ZeroCurve {
        names: names(&["x1", "x2", "x3", "x4", "y1", "alpha"]),
        components,
        denominator_index: Some(0),
        cleared: vec![0, 1, 2, 3],
        excluded: vec![G::int(0), G::int(1)],
    }
}

fn rat_matrix(rows: &[[(i64, i64); 6]]) -> Matrix<G> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&(n, d)| G::ratio(n, d)).collect()).collect()).expect("6x6")
}

pub fn cert_a() -> Matrix<G> {
    let z = (0, 1);
    let i = |n: i64| (n, 1);
    rat_matrix(&[
        [i(36), z, i(-3), z, z, z],
        [z, i(2), i(-1), z, i(-1), z],
        [i(-3), i(-1), i(1), z, i(1), z],
        [z, z, z, i(2), z, z],
        [z, i(-1), i(1), z, (3, 2), z],
        [z, z, z, z, z, i(1)],
    ])
}

pub fn cert_b() -> Matrix<G> {
    let z = (0, 1);
    let i = |n: i64| (n, 1);
    rat_matrix(&[
        [z, z, z, i(6), z, i(3)],
        [z, z, z, z, z, i(-1)],
        [z, z, z, z, z, z],
        [i(6), z, z, z, i(1), z],
        [z, z, z, i(1), z, z],
        [i(3), i(-1), z, z, z, z],
    ])
}

/// `m = (α, x₁, x₂, x₄, ᾱx₁, ᾱx₄)` over `(x₁, x₂, x₄, α)`.
pub fn cert_monomials() -> Vec<ExponentPair> {
    let n = 4;
    vec![
        term(n, &[(3, 1)], &[]),
        term(n, &[(0, 1)], &[]),
        term(n, &[(1, 1)], &[]),
        term(n, &[(2, 1)], &[]),
        term(n, &[(0, 1)], &[(3, 1)]),
        term(n, &[(2, 1)], &[(3, 1)]),
    ]
}

pub fn appendix_q_certificate() -> GramCertificate<G> {
    GramCertificate {
        basis: cert_monomials(),
        a: cert_a(),
        b: cert_b(),
    }
}

/// `|Φ⁺⟩⟨Φ⁺|` on `C² ⊗ C²`.
pub fn bell_state() -> HermitianMatrix<G> {
    let h = G::ratio(1, 2);
    let z = G::int(0);
    HermitianMatrix::new(
        Matrix::from_rows(vec![
            vec![h.clone(), z.clone(), z.clone(), h.clone()],
            vec![z.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), z.clone()],
            vec![h.clone(), z.clone(), z.clone(), h],
        ])
        .expect("4x4"),
    )
    .expect("Hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ExponentPair as E;

    #[test]
    fn hakye_image_of_e11() {
        let phi = hakye_map();
        let img = phi.apply(&Matrix::unit(2, 0, 0)).unwrap();
        let want = Matrix::from_rows(vec![
            vec![G::int(4), G::int(-2), G::int(0), G::int(0)],
            vec![G::int(-2), G::int(2), G::int(0), G::int(0)],
            vec![G::int(0), G::int(0), G::int(0), G::int(0)],
            vec![G::int(0), G::int(0), G::int(0), G::int(4)],
        ])
        .unwrap();
        assert_eq!(img, want);
    }

    #[test]
    fn w_has_coefficient_four_on_x1_y1() {
        let w = hakye_w();
        let e = term(6, &[(0, 1), (4, 1)], &[(0, 1), (4, 1)]);
        assert_eq!(w.coeff(&e), G::int(4));
    }

    #[test]
    fn appendix_p_matches_displayed_formula() {
        let p = appendix_p();
        assert_eq!(p.poly().names(), &["x2", "x3", "x4", "alpha"]);
        let t = |u: &[(usize, u32)], v: &[(usize, u32)]| term(4, u, v);
        let (x2, x3, x4, al) = (0, 1, 2, 3);
        let expected: Vec<(E, i64)> = vec![
            (t(&[(al, 1), (x3, 1)], &[(al, 1), (x3, 1)]), 2),
            (t(&[(al, 1), (x4, 1)], &[(al, 1), (x4, 1)]), 2),
            (t(&[(al, 1), (x3, 1)], &[(al, 1), (x4, 1)]), -1),
            (t(&[(al, 1), (x4, 1)], &[(al, 1), (x3, 1)]), -1),
            (t(&[(x3, 1), (al, 1)], &[(x2, 1)]), 1),
            (t(&[(x2, 1)], &[(x3, 1), (al, 1)]), 1),
            (t(&[(x4, 1), (al, 1)], &[(x3, 1)]), -2),
            (t(&[(x3, 1)], &[(x4, 1), (al, 1)]), -2),
            (t(&[(al, 1)], &[(al, 1)]), 3),
            (t(&[(x2, 1)], &[(x2, 1)]), 2),
            (t(&[(x4, 1)], &[(x4, 1)]), 4),
            (t(&[(x2, 1), (al, 1)], &[]), 2),
            (t(&[], &[(x2, 1), (al, 1)]), 2),
            (t(&[(x2, 1)], &[]), -2),
            (t(&[], &[(x2, 1)]), -2),
            (t(&[(al, 1)], &[]), -2),
            (t(&[], &[(al, 1)]), -2),
            (t(&[], &[]), 4),
        ];
        assert_eq!(p.terms().count(), expected.len());
        for (e, c) in expected {
            assert_eq!(p.coeff(&e), G::int(c), "{}", e.display(p.poly().names()));
        }
    }

    #[test]
    fn choi_polynomial_values() {
        let p = choi_polynomial();
        let ones = vec![G::int(1); 6];
        assert_eq!(p.evaluate_exact(&ones).unwrap(), crate::scalar::rat_int(3));
        let e = term(6, &[(0, 1), (3, 1)], &[(1, 1), (4, 1)]);
        assert_eq!(p.coeff(&e), G::int(-1));
        assert_eq!(p.coeff(&e.conj()), G::int(-1));
        assert_eq!(choi_dehom().nvars(), 4);
    }

    #[test]
    fn catalog_resolves_every_name() {
        for n in FIXTURE_NAMES {
            assert!(fixture(n).is_ok(), "{n}");
        }
        assert!(fixture("appendix_q").is_ok());
        assert!(matches!(fixture("nope"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn bell_state_has_unit_trace() {
        assert_eq!(bell_state().matrix().trace(), G::int(1));
    }
}
