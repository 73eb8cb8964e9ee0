mod common;

use common::*;
use proptest::prelude::*;
use sepsos::poly::{conjugate_square, HermitianPolynomial, Poly};
use sepsos::scalar::{GaussRat, Scalar};

proptest! {
    #[test]
    fn ring_axioms(a in poly(3, 2, 4), b in poly(3, 2, 4), c in poly(3, 2, 4)) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn conjugation_is_an_antilinear_involution(a in poly(3, 2, 5), b in poly(3, 2, 5), s in gauss()) {
        prop_assert_eq!(a.conjugate().conjugate(), a.clone());
        prop_assert_eq!(a.mul(&b).unwrap().conjugate(), a.conjugate().mul(&b.conjugate()).unwrap());
        prop_assert_eq!(a.scale(&s).conjugate(), a.conjugate().scale(&s.conj()));
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(2, 2, 4), b in poly(2, 2, 4), z in gauss_point(2)) {
        let sum = a.add(&b).unwrap().eval(&z).unwrap();
        prop_assert_eq!(sum, a.eval(&z).unwrap().plus(&b.eval(&z).unwrap()));
        let prod = a.mul(&b).unwrap().eval(&z).unwrap();
        prop_assert_eq!(prod, a.eval(&z).unwrap().times(&b.eval(&z).unwrap()));
        prop_assert_eq!(a.conjugate().eval(&z).unwrap(), a.eval(&z).unwrap().conj());
    }

    #[test]
    fn hermitian_polynomials_are_real_valued(p in hermitian(3, 2, 5), z in gauss_point(3)) {
        prop_assert!(p.evaluate_exact(&z).is_ok());
        let zf: Vec<_> = z.iter().map(|c| c.to_c64()).collect();
        let v = p.evaluate(&zf).unwrap();
        let exact = sepsos::scalar::rat_to_f64(&p.evaluate_exact(&z).unwrap());
        prop_assert!((v - exact).abs() <= 1e-9 * (1.0 + exact.abs()));
    }

    #[test]
    fn conjugate_squares_are_nonnegative(g in poly(3, 1, 5), z in gauss_point(3)) {
        let sq = conjugate_square(&g);
        let v = sq.evaluate_exact(&z).unwrap();
        prop_assert!(v >= sepsos::scalar::rat_int(0));
    }

    #[test]
    fn non_hermitian_input_is_rejected(g in poly(2, 2, 4)) {
        let herm = g.conjugate() == g;
        prop_assert_eq!(HermitianPolynomial::new(g).is_ok(), herm);
    }

    #[test]
    fn dehomogenize_then_evaluate(p in hermitian(3, 1, 5), z in gauss_point(2), c in gauss_int()) {
        let d = p.dehomogenize(&[(2, c.clone())]).unwrap();
        let full = vec![z[0].clone(), z[1].clone(), c];
        let lhs = d.poly().eval(&z).unwrap();
        let rhs = p.poly().eval(&full).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pow_matches_repeated_product(a in poly(2, 1, 3), k in 0u32..4) {
        let mut acc = Poly::constant(2, GaussRat::one());
        for _ in 0..k {
            acc = acc.mul(&a).unwrap();
        }
        prop_assert_eq!(a.pow(k), acc);
    }
}
