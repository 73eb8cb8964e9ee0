mod common;

use common::*;
use proptest::prelude::*;
use sepsos::linalg::Matrix;
use sepsos::sdp::{solve, verify_outcome, SdpOptions, SdpProblem, SdpStatus};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn feasible_problems_return_verified_points(
        b in matrix(3, 3),
        cons in prop::collection::vec(hermitian_matrix(3), 1..=4),
    ) {
        let b = b.to_c64();
        let x0 = b.mul(&b.adjoint()).unwrap().add(&Matrix::identity(3)).unwrap();
        let mut p = SdpProblem::new(3);
        for a in &cons {
            let a = a.matrix().to_c64();
            let rhs = a.inner(&x0);
            p.add_constraint(a, rhs).unwrap();
        }
        let out = solve(&p, &SdpOptions::default()).unwrap();
        prop_assert_eq!(out.status, SdpStatus::Feasible);
        let (ok, margins) = verify_outcome(&p, &out, 1e-7);
        prop_assert!(ok, "{:?}", margins);
    }

    #[test]
    fn negative_trace_is_infeasible(c in hermitian_matrix(2), t in 1.0f64..5.0) {
        let mut p = SdpProblem::new(2);
        p.add_constraint(Matrix::identity(2), -t).unwrap();
        p.add_constraint(c.matrix().to_c64(), 0.0).unwrap();
        let out = solve(&p, &SdpOptions::default()).unwrap();
        if out.status == SdpStatus::Infeasible {
            let (ok, margins) = verify_outcome(&p, &out, 1e-7);
            prop_assert!(ok, "{:?}", margins);
        } else {
            prop_assert_eq!(out.status, SdpStatus::Indeterminate);
        }
    }
}
