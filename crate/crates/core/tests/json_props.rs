mod common;

use common::*;
use proptest::prelude::*;
use sepsos::choi::{MatrixMap, Orientation};
use sepsos::json::{
    detect_regime, map_from_json, map_to_json, matrix_from_json, matrix_to_json, poly_from_json, poly_to_json,
    state_from_json, state_to_json,
};
use sepsos::poly::HermitianPolynomial;
use sepsos::scalar::{GaussRat, Regime, C64};
use sepsos::states::random_separable;

proptest! {
    #[test]
    fn exact_polynomials_round_trip(p in hermitian(3, 2, 6)) {
        let v = poly_to_json(&p);
        prop_assert_eq!(detect_regime(&v), Regime::Exact);
        let back: HermitianPolynomial<GaussRat> = poly_from_json(&serde_json::from_str(&v.to_string()).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn float_polynomials_round_trip_bitwise(p in hermitian(2, 2, 5), s in 0.1f64..10.0) {
        let q = p.to_c64().scale_real(&C64::new(s.sqrt(), 0.0)).unwrap();
        let back: HermitianPolynomial<C64> = poly_from_json(&poly_to_json(&q)).unwrap();
        prop_assert_eq!(back, q);
    }

    #[test]
    fn matrices_round_trip(m in matrix(3, 3)) {
        let back: sepsos::linalg::Matrix<GaussRat> = matrix_from_json(&matrix_to_json(&m)).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn maps_round_trip(c in hermitian_matrix(6), o in prop_oneof![Just(Orientation::InputFirst), Just(Orientation::OutputFirst)]) {
        let phi = MatrixMap::new(2, 3, c).unwrap();
        let (back, bo) = map_from_json::<GaussRat>(&map_to_json(&phi, o)).unwrap();
        prop_assert_eq!(back, phi);
        prop_assert_eq!(bo, o);
    }

    #[test]
    fn states_round_trip(k in 1usize..5, seed in any::<u64>()) {
        let s = random_separable((2, 3), k, seed).unwrap().state;
        let v = state_to_json(&s);
        prop_assert_eq!(detect_regime(&v), Regime::Float);
        let back = state_from_json::<C64>(&v, None).unwrap();
        prop_assert_eq!(back, s);
    }
}
