mod common;

use common::*;
use proptest::prelude::*;
use sepsos::linalg::{hermitian_eigenvalues, HermitianMatrix};
use sepsos::par::{map_range, map_slice, Exec};
use sepsos::scalar::Scalar;
use sepsos::states::{
    embed_section, maximally_entangled, partial_trace, partial_transpose, ppt_check, random_separable, section_predicate,
    DensityMatrix, Factor,
};

fn factor() -> impl Strategy<Value = Factor> {
    prop_oneof![Just(Factor::First), Just(Factor::Second)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separable_states_are_ppt(n in 2usize..=3, m in 2usize..=3, k in 1usize..=8, seed in any::<u64>()) {
        let s = random_separable((n, m), k, seed).unwrap();
        let r = ppt_check(&s.state, 1e-10);
        prop_assert!(r.pass, "{:?}", r);
        let tr: f64 = (0..n * m).map(|i| s.state.matrix().get(i, i).re).sum();
        prop_assert!((tr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution(
        (n, m, rho) in (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| (Just(n), Just(m), hermitian_matrix(n * m))),
        w in factor(),
    ) {
        let once = partial_transpose(&rho, (n, m), w).unwrap();
        prop_assert_eq!(partial_transpose(&once, (n, m), w).unwrap(), rho.clone());
        let full = partial_transpose(&once, (n, m), if w == Factor::First { Factor::Second } else { Factor::First }).unwrap();
        prop_assert_eq!(full.matrix(), &rho.matrix().transpose());
        for f in [Factor::First, Factor::Second] {
            prop_assert_eq!(partial_trace(&rho, (n, m), f).unwrap().matrix().trace(), rho.matrix().trace());
        }
    }

    #[test]
    fn sections_of_separable_states_satisfy_the_predicate(m in 2usize..=3, k in 1usize..=6, big in 3usize..=4, seed in any::<u64>()) {
        let s = random_separable((2, m), k, seed).unwrap();
        let embedded = embed_section(&s.state, big).unwrap();
        prop_assert!(section_predicate(&embedded, 2).unwrap());
        let via_terms = s.embed_section(big).unwrap();
        let diff = embedded.matrix().matrix().sub(via_terms.state.matrix().matrix()).unwrap();
        prop_assert!(diff.max_abs() <= 1e-12);
    }

    #[test]
    fn exec_modes_agree(n in 0usize..200, data in prop::collection::vec(any::<i64>(), 0..100)) {
        let f = |i: usize| (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        prop_assert_eq!(map_range(Exec::Sequential, n, f), map_range(Exec::Parallel, n, f));
        let g = |x: &i64| x.wrapping_mul(3) ^ 5;
        prop_assert_eq!(map_slice(Exec::Sequential, &data, g), map_slice(Exec::Parallel, &data, g));
    }
}

#[test]
fn maximally_entangled_partial_transpose_spectrum() {
    for d in 2..=4 {
        let rho: DensityMatrix<sepsos::scalar::GaussRat> = maximally_entangled(d);
        let pt = partial_transpose(rho.matrix(), (d, d), Factor::Second).unwrap();
        let ev = hermitian_eigenvalues(&HermitianMatrix::new(pt.matrix().to_c64()).unwrap());
        let want = -1.0 / d as f64;
        assert!((ev[0] - want).abs() < 1e-12, "d = {d}: {}", ev[0]);
        assert!(!ppt_check(&rho, 1e-10).pass);
        assert_eq!(pt.matrix().trace(), sepsos::scalar::GaussRat::one());
    }
}
