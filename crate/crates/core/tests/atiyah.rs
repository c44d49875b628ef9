use std::collections::BTreeMap;

use algebroid_core::atiyah::*;
use algebroid_core::fixtures;
use algebroid_core::gluing::{check_h_transitions, propagate, verify_cocycles, GluingData, Nerve};
use algebroid_core::random;
use algebroid_core::tla::{integrate, tla_bracket, Chart, InnerMetricLocal, TlaSection};
use algebroid_core::{LieAlgebra, Matrix, Poly, Scalar, TlaForm, ValueKind};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn trace_metrics(gd: &GluingData) -> BTreeMap<usize, InnerMetricLocal> {
    (0..gd.nerve.num_charts()).map(|i| (i, trace_inner_metric(2))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_integration_commutes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gd = fixtures::unipotent_gl2(2);
        let real = MatrixRealization::gl(2);
        let h = trace_metrics(&gd);
        let w = random::form(&mut rng, 2, 4, ValueKind::Algebra, 2, 4);
        let gf = propagate(&gd, 0, &w).unwrap();
        let dgf = gf.map(|_, x| x.total_diff(&gd.algebra)).unwrap();
        let lhs = inner_integrate_trace(&gd, &real, &dgf, &h).unwrap();
        let rhs = inner_integrate_trace(&gd, &real, &gf, &h).unwrap().map(|_, x| Ok(x.de_rham_d())).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        // scalar results agree on overlaps
        prop_assert_eq!(&lhs.locals[&0], &lhs.locals[&1]);
    }

    #[test]
    fn det_projection_is_a_bracket_morphism(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let real = MatrixRealization::gl(2);
        let a = random::section(&mut rng, 2, 4, 2);
        let b = random::section(&mut rng, 2, 4, 2);
        let lhs = det_projection(&real, &tla_bracket(&real.algebra, &a, &b).unwrap());
        let ab = LieAlgebra::abelian(1);
        let rhs = tla_bracket(&ab, &det_projection(&real, &a), &det_projection(&real, &b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn splitting_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let real = MatrixRealization::gl(2);
        let s = random::section(&mut rng, 2, 4, 2);
        let (lambda, g0) = sl_splitting(&real, &s).unwrap();
        prop_assert!(det_projection(&real, &g0).gamma[0].is_zero());
        let half = lambda.scale(&Scalar::frac(1, 2));
        let back: Vec<Poly> = g0.gamma.iter().enumerate()
            .map(|(a, g)| if a == 0 || a == 3 { g + &half } else { g.clone() })
            .collect();
        prop_assert_eq!(back, s.gamma);
    }

    #[test]
    fn exact_forms_pair_to_zero(seed in any::<u64>()) {
        // ∫ ĥd ω ∧ η with η = ĥd β; coefficients of ω vanish on the box boundary
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = LieAlgebra::sl2();
        let h = InnerMetricLocal::new(g.killing_form().scale(&Scalar::frac(1, 2))).unwrap();
        let chart = Chart::unit_box(1);
        let bump = &Poly::x(0) * &(&Poly::one() - &Poly::x(0));
        let top = TlaForm::term(1, 3, ValueKind::Scalar, &[], &[0, 1, 2], 0, Poly::one()).unwrap();
        for p in 0..=4 {
            let w = random::homogeneous_form(&mut rng, 1, 3, ValueKind::Scalar, p, 2, 3).mul_poly(&bump);
            let beta = random::homogeneous_form(&mut rng, 1, 3, ValueKind::Scalar, 3 - p.min(3), 2, 3);
            for eta in [beta.total_diff(&g).unwrap(), top.clone()] {
                let pair = w.total_diff(&g).unwrap().wedge(&eta).unwrap();
                prop_assert!(integrate(&pair, &h, &chart).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn invariant_metrics_satisfy_transitions() {
    for gd in [fixtures::constant_ad(2), fixtures::unipotent_sl2(2)] {
        let k = killing_inner_metric(&gd).unwrap();
        assert_eq!(k[&0].matrix().get(0, 0), &Scalar::from_int(8));
        assert_eq!(k[&0].matrix().get(1, 2), &Scalar::from_int(4));
        assert!(check_h_transitions(&gd, &k).unwrap().ok());
        // √|h| is constant by construction; only the scaled form has a rational one
        assert!(k[&0].sqrt_det().is_err());
        assert_eq!(killing_inner_metric_scaled(&gd, &Scalar::frac(1, 2)).unwrap()[&1].sqrt_det().unwrap(), &Scalar::from_int(4));
    }
    let gd = fixtures::unipotent_gl2(2);
    assert!(check_h_transitions(&gd, &trace_metrics(&gd)).unwrap().ok());
}

#[test]
fn trace_of_unit_and_traceless_values() {
    let gd = GluingData::trivial(Nerve::full(1, 2), LieAlgebra::gl(2));
    let real = MatrixRealization::gl(2);
    let h = trace_metrics(&gd);
    let vol = TlaForm::term(1, 4, ValueKind::Scalar, &[], &[0, 1, 2, 3], 0, Poly::one()).unwrap();
    let unit = vol.with_value(0).unwrap().add(&vol.with_value(3).unwrap());
    let gf = propagate(&gd, 0, &unit).unwrap();
    let r = inner_integrate_trace(&gd, &real, &gf, &h).unwrap();
    assert_eq!(r.locals[&0], TlaForm::function(1, 4, Poly::from_int(2)));
    let traceless = propagate(&gd, 0, &vol.with_value(1).unwrap()).unwrap();
    assert!(inner_integrate_trace(&gd, &real, &traceless, &h).unwrap().locals[&0].is_zero());
}

#[test]
fn perturbed_family_fails_on_the_triangle() {
    let tf = fixtures::unipotent_family(2);
    let mut bad = tf.clone();
    let (g, ginv) = bad.get(0, 1).unwrap();
    let shift = |s: i64| Matrix::from_rows(vec![vec![Poly::one(), Poly::from_int(s)], vec![Poly::zero(), Poly::one()]]);
    bad.set(0, 1, g.mul(&shift(1)), shift(-1).mul(&ginv));
    assert!(bad.check_cocycle().is_err());
    for real in [MatrixRealization::gl(2), MatrixRealization::sl2()] {
        assert!(verify_cocycles(&atiyah_gluing(&tf, &real).unwrap()).ok());
        let rep = verify_cocycles(&atiyah_gluing(&bad, &real).unwrap());
        assert_eq!(rep.simplices(), vec![vec![0, 1, 2]]);
    }
}

#[test]
fn unit_transitions_are_trivial() {
    let gd = fixtures::units_p1(1);
    assert_eq!(gd.alpha(0, 1).unwrap(), Matrix::identity(1));
    assert!(gd.chi(0, 2).unwrap().is_zero());
    let s = TlaSection::new(vec![Poly::zero()], vec![Poly::one()]);
    assert_eq!(det_projection(&MatrixRealization::gl(1), &s), s);
}
