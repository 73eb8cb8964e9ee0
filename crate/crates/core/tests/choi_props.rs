mod common;

use common::*;
use proptest::prelude::*;
use sepsos::choi::{cp_from_kraus, decomposable_from, positivity_sample, KrausSet, MatrixMap, Orientation};
use sepsos::linalg::Matrix;
use sepsos::par::Exec;
use sepsos::scalar::GaussRat;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3, 1usize..=3)
}

fn map() -> impl Strategy<Value = MatrixMap<GaussRat>> {
    dims().prop_flat_map(|(m, n)| hermitian_matrix(m * n).prop_map(move |c| MatrixMap::new(m, n, c).unwrap()))
}

fn kraus(m: usize, n: usize) -> impl Strategy<Value = KrausSet<GaussRat>> {
    prop::collection::vec(matrix(n, m), 0..=3).prop_map(move |ops| KrausSet::new(m, n, ops).unwrap())
}

fn orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![Just(Orientation::InputFirst), Just(Orientation::OutputFirst)]
}

proptest! {
    #[test]
    fn biquadratic_round_trip(phi in map(), o in orientation()) {
        let p = phi.map_to_biquadratic(o);
        prop_assert_eq!(MatrixMap::biquadratic_to_map(&p, o).unwrap(), phi);
    }

    #[test]
    fn kraus_form_matches_choi_form(k in dims().prop_flat_map(|(m, n)| kraus(m, n))) {
        let phi = cp_from_kraus(&k);
        prop_assert_eq!(phi.map_to_biquadratic(Orientation::InputFirst), k.biquadratic_sum_of_squares());
    }

    #[test]
    fn choi_map_applies_linearly(phi in map(), s in gauss()) {
        let m = phi.in_dim();
        let x = Matrix::from_fn(m, m, |i, j| GaussRat::int((i * m + j) as i64 - 1));
        let y = Matrix::from_fn(m, m, |i, j| GaussRat::complex(i as i64, j as i64));
        let lhs = phi.apply(&x.scale(&s).add(&y).unwrap()).unwrap();
        let rhs = phi.apply(&x).unwrap().scale(&s).add(&phi.apply(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let e = phi.apply(&Matrix::unit(m, 0, 0)).unwrap();
        prop_assert_eq!(e, phi.block(0, 0));
    }

    #[test]
    fn transpose_composition_is_an_involution(phi in map()) {
        prop_assert_eq!(phi.compose_transpose().compose_transpose(), phi);
    }

    #[test]
    fn decomposable_forms_are_nonnegative(k1 in kraus(2, 2), k2 in kraus(2, 2), z in point(4)) {
        let phi = decomposable_from(&k1, &k2).unwrap();
        let v = phi.map_to_biquadratic(Orientation::InputFirst).evaluate(&z).unwrap();
        prop_assert!(v >= -1e-9 * (1.0 + z.iter().map(|c| c.norm_sqr()).sum::<f64>().powi(2)));
        let s = positivity_sample(&phi, 16, 7, Exec::Sequential);
        prop_assert!(s.min_eigenvalue >= -1e-9);
    }

    #[test]
    fn positivity_sample_is_independent_of_exec(phi in map(), seed in any::<u64>()) {
        let a = positivity_sample(&phi, 24, seed, Exec::Sequential);
        let b = positivity_sample(&phi, 24, seed, Exec::Parallel);
        prop_assert_eq!(a.min_eigenvalue.to_bits(), b.min_eigenvalue.to_bits());
        prop_assert_eq!(a.argmin, b.argmin);
    }
}
