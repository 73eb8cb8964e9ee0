mod common;

use common::*;
use proptest::prelude::*;
use sepsos::json::{certificate_from_json, gram_certificate_to_json, moment_certificate_to_json, Certificate};
use sepsos::linalg::{nullspace, rational_is_psd, rational_psd_check, HermitianMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepsos::poly::{conjugate_square, ExponentPair, HermitianPolynomial, Poly};
use sepsos::scalar::{rat, GaussRat, Scalar};
use sepsos::sos::{sos_check_auto, verify_gram, verify_moment, SosOptions, SosVerdict};

fn sum_of_squares(gs: &[Poly<GaussRat>]) -> HermitianPolynomial<GaussRat> {
    gs.iter()
        .map(conjugate_square)
        .fold(HermitianPolynomial::zero(2), |a, b| a.add(&b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_psd_witness_verifies(b in matrix(4, 3)) {
        let m = HermitianMatrix::new(b.mul(&b.adjoint()).unwrap()).unwrap();
        let w = rational_psd_check(&m);
        prop_assert!(w.is_psd());
        prop_assert!(w.verify(&m));
        let mut shifted = m.matrix().clone();
        shifted[(2, 2)] = shifted[(2, 2)].minus(&GaussRat::int(1)).minus(&m.matrix()[(2, 2)]);
        let s = HermitianMatrix::new(shifted).unwrap();
        let w = rational_psd_check(&s);
        prop_assert!(!w.is_psd());
        prop_assert!(w.verify(&s));
    }

    #[test]
    fn fraction_free_psd_matches_ldl(b in matrix(4, 2), c in hermitian_matrix(4)) {
        for h in [HermitianMatrix::new(b.mul(&b.adjoint()).unwrap()).unwrap(), c] {
            prop_assert_eq!(rational_is_psd(&h), rational_psd_check(&h).is_psd());
        }
    }

    #[test]
    fn nullspace_vectors_are_annihilated(a in matrix(3, 5)) {
        for v in nullspace(&a) {
            prop_assert!(a.mul_vec(&v).unwrap().iter().all(Scalar::is_zero));
        }
        prop_assert!(nullspace(&a).len() >= 2);
    }

    #[test]
    fn sums_of_squares_are_never_refuted(gs in prop::collection::vec(poly(2, 1, 3), 1..=3)) {
        let p = sum_of_squares(&gs);
        prop_assume!(!p.is_zero());
        let r = sos_check_auto(&p, &SosOptions::default()).unwrap();
        match r.verdict {
            SosVerdict::Sos(cert) => {
                prop_assert!(verify_gram(&p, &cert).unwrap());
                let back = certificate_from_json::<GaussRat>(&gram_certificate_to_json(&cert, None)).unwrap();
                prop_assert_eq!(back, Certificate::Gram(cert));
            }
            SosVerdict::NotSos(_) => {
                return Err(TestCaseError::fail(format!("refuted {}", p.poly().display())));
            }
            SosVerdict::Indeterminate(_) => {}
        }
    }

    #[test]
    fn negated_squares_get_verified_refutations(gs in prop::collection::vec(poly(2, 1, 3), 1..=2)) {
        let p = sum_of_squares(&gs).neg();
        prop_assume!(!p.is_zero());
        let r = sos_check_auto(&p, &SosOptions::default()).unwrap();
        let SosVerdict::NotSos(cert) = r.verdict else {
            return Err(TestCaseError::fail(format!("{} for {}", r.verdict.label(), p.poly().display())));
        };
        prop_assert!(verify_moment(&p, &cert).unwrap());
        let back = certificate_from_json::<GaussRat>(&moment_certificate_to_json(&cert, None)).unwrap();
        prop_assert_eq!(back, Certificate::Moment(cert));
    }

    #[test]
    fn tampered_gram_certificates_are_rejected(gs in prop::collection::vec(poly(2, 1, 3), 1..=2), bump in 1i64..4) {
        let p = sum_of_squares(&gs);
        prop_assume!(!p.is_zero());
        let r = sos_check_auto(&p, &SosOptions::default()).unwrap();
        let SosVerdict::Sos(mut cert) = r.verdict else {
            return Ok(());
        };
        cert.a[(0, 0)] = cert.a[(0, 0)].plus(&GaussRat::int(bump));
        prop_assert!(!verify_gram(&p, &cert).unwrap());
    }
}

fn random_sum_of_squares(rng: &mut ChaCha8Rng) -> HermitianPolynomial<GaussRat> {
    let gs: Vec<Poly<GaussRat>> = (0..rng.random_range(1..=3))
        .map(|_| {
            let mut g = Poly::zero(2);
            for _ in 0..rng.random_range(0..=3) {
                let e = ExponentPair::new(
                    (0..2).map(|_| rng.random_range(0..=1)).collect(),
                    (0..2).map(|_| rng.random_range(0..=1)).collect(),
                );
                let d = rng.random_range(1..=3);
                g.add_term(e, GaussRat::new(rat(rng.random_range(-3..=3), d), rat(rng.random_range(-3..=3), d)));
            }
            g
        })
        .collect();
    sum_of_squares(&gs)
}

#[test]
fn most_random_sums_of_squares_are_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut certified, mut total) = (0, 0);
    while total < 40 {
        let p = random_sum_of_squares(&mut rng);
        if p.is_zero() {
            continue;
        }
        total += 1;
        match sos_check_auto(&p, &SosOptions::default()).unwrap().verdict {
            SosVerdict::Sos(cert) => {
                assert!(verify_gram(&p, &cert).unwrap());
                certified += 1;
            }
            SosVerdict::NotSos(_) => panic!("refuted {}", p.poly().display()),
            SosVerdict::Indeterminate(_) => {}
        }
    }
    assert!(certified >= 34, "{certified}/{total} certified");
}

#[test]
fn float_regime_agrees_on_a_simple_square() {
    let x = Poly::<GaussRat>::var(2, 0);
    let y = Poly::<GaussRat>::var(2, 1);
    let g = x.sub(&y.scale(&GaussRat::complex(0, 2))).unwrap();
    let p = conjugate_square(&g);
    let exact = sos_check_auto(&p, &SosOptions::default()).unwrap();
    let float = sos_check_auto(&p.to_c64(), &SosOptions::default()).unwrap();
    assert!(exact.verdict.is_sos());
    assert!(float.verdict.is_sos());
}
