use algebroid_core::random;
use algebroid_core::{LieAlgebra, TlaForm, ValueKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn algebras() -> Vec<LieAlgebra> {
    vec![LieAlgebra::abelian(2), LieAlgebra::sl2(), LieAlgebra::heis3(), LieAlgebra::aff1()]
}

fn sample(seed: u64, m: usize, n: usize, kind: ValueKind) -> TlaForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random::form(&mut rng, m, n, kind, 3, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn de_rham_squares_to_zero(seed in any::<u64>(), m in 1usize..=3) {
        let w = sample(seed, m, 2, ValueKind::Algebra);
        prop_assert!(w.de_rham_d().de_rham_d().is_zero());
    }

    #[test]
    fn ce_squares_to_zero(seed in any::<u64>(), which in 0usize..4, scalar in any::<bool>()) {
        let g = &algebras()[which];
        let kind = if scalar { ValueKind::Scalar } else { ValueKind::Algebra };
        let w = sample(seed, 2, g.dim(), kind);
        prop_assert!(w.ce_diff(g).unwrap().ce_diff(g).unwrap().is_zero());
    }

    #[test]
    fn total_squares_to_zero(seed in any::<u64>(), which in 0usize..4, m in 1usize..=3) {
        let g = &algebras()[which];
        let w = sample(seed, m, g.dim(), ValueKind::Algebra);
        let d = |x: &TlaForm| x.total_diff(g).unwrap();
        prop_assert!(d(&d(&w)).is_zero());
    }

    #[test]
    fn total_diff_is_a_derivation(seed in any::<u64>(), which in 0usize..4) {
        let g = &algebras()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::homogeneous_form(&mut rng, 2, g.dim(), ValueKind::Scalar, 2, 2, 3);
        let b = random::form(&mut rng, 2, g.dim(), ValueKind::Algebra, 2, 3);
        let lhs = a.wedge(&b).unwrap().total_diff(g).unwrap();
        let rhs = a.total_diff(g).unwrap().wedge(&b).unwrap().add(&a.wedge(&b.total_diff(g).unwrap()).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}
