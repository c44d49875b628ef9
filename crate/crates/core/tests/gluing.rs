use std::collections::BTreeMap;

use algebroid_core::atiyah::{killing_inner_metric_scaled, trace_inner_metric};
use algebroid_core::fixtures;
use algebroid_core::gluing::*;
use algebroid_core::random;
use algebroid_core::tla::{BaseMetricLocal, InnerMetricLocal, LocalConnectionForm};
use algebroid_core::{Matrix, Poly, Scalar, TlaForm, ValueKind};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gluings() -> Vec<(&'static str, GluingData)> {
    fixtures::all()
}

fn random_connection(gd: &GluingData, rng: &mut ChaCha8Rng) -> GlobalConnection {
    let a0 = Matrix::from_fn(gd.n(), gd.m(), |_, _| random::poly(rng, gd.m(), 2, 2));
    let mut a = BTreeMap::new();
    for j in 0..gd.nerve.num_charts() {
        let aj = gd.alpha(j, 0).unwrap().mul(&a0).add(&gd.chi(j, 0).unwrap());
        a.insert(j, LocalConnectionForm::new(aj));
    }
    GlobalConnection { a }
}

fn invariant_h(name: &str, gd: &GluingData) -> InnerMetricLocal {
    if name.contains("sl2") {
        killing_inner_metric_scaled(gd, &Scalar::frac(1, 2)).unwrap()[&0].clone()
    } else if name.contains("gl2") {
        trace_inner_metric(2)
    } else {
        InnerMetricLocal::identity(gd.n())
    }
}

fn random_base_metric(m: usize, rng: &mut ChaCha8Rng) -> BaseMetricLocal {
    loop {
        let l = Matrix::from_fn(m, m, |_, _| random::scalar(rng));
        let g = l.transpose().mul(&l).add(&Matrix::identity(m));
        if let Ok(b) = BaseMetricLocal::new(g) {
            return b;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alpha_hat_commutes_with_total_diff(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, gd) in gluings() {
            for &(i, j) in gd.pairs().collect::<Vec<_>>() {
                let kind = if rng.gen() { ValueKind::Algebra } else { ValueKind::Scalar };
                let w = random::form(&mut rng, gd.m(), gd.n(), kind, 2, 3);
                let lhs = apply_alpha_hat(&gd, i, j, &w.total_diff(&gd.algebra).unwrap()).unwrap();
                let rhs = apply_alpha_hat(&gd, i, j, &w).unwrap().total_diff(&gd.algebra).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn alpha_hat_respects_wedge(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, gd) in gluings() {
            let a = random::form(&mut rng, gd.m(), gd.n(), ValueKind::Scalar, 2, 3);
            let b = random::form(&mut rng, gd.m(), gd.n(), ValueKind::Algebra, 2, 3);
            let ab = apply_alpha_hat(&gd, 0, 1, &a.wedge(&b).unwrap()).unwrap();
            let sep = apply_alpha_hat(&gd, 0, 1, &a).unwrap().wedge(&apply_alpha_hat(&gd, 0, 1, &b).unwrap()).unwrap();
            prop_assert_eq!(ab, sep);
        }
    }

    #[test]
    fn propagated_forms_glue(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, gd) in gluings() {
            let w = random::form(&mut rng, gd.m(), gd.n(), ValueKind::Algebra, 2, 3);
            let gf = propagate(&gd, 0, &w).unwrap();
            prop_assert!(check_global_form(&gd, &gf).unwrap().ok());
            prop_assert!(check_global_form(&gd, &global_total_diff(&gd, &gf).unwrap()).unwrap().ok());
            let k = rng.gen_range(0..gd.nerve.num_charts());
            let mut bad = gf.clone();
            let bump = TlaForm::term(gd.m(), gd.n(), ValueKind::Algebra, &[], &[0], 0, Poly::one()).unwrap();
            bad.locals.insert(k, bad.locals[&k].add(&bump));
            let rep = check_global_form(&gd, &bad).unwrap();
            prop_assert!(!rep.ok());
            prop_assert!(rep.simplices().iter().all(|s| s.contains(&k)));
        }
    }

    #[test]
    fn metric_triple_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, gd) in gluings() {
            let h = invariant_h(name, &gd);
            let g = random_base_metric(gd.m(), &mut rng);
            let conn = random_connection(&gd, &mut rng);
            prop_assert!(check_global_connection(&gd, &conn).unwrap().ok());
            let charts = 0..gd.nerve.num_charts();
            let t = MetricTriple {
                g: charts.clone().map(|i| (i, g.clone())).collect(),
                h: charts.clone().map(|i| (i, h.clone())).collect(),
                conn,
            };
            let md = triple_to_metric(&t).unwrap();
            prop_assert!(check_metric_transitions(&gd, &md).unwrap().ok(), "{}", name);
            let back = metric_to_triple(&md).unwrap();
            prop_assert_eq!(&back, &t);
            prop_assert!(check_global_connection(&gd, &back.conn).unwrap().ok());
            for (i, b) in &md.charts {
                prop_assert!(connection_defect(b, back.conn.get(*i).unwrap()).is_zero());
                let mut other = back.conn.get(*i).unwrap().clone();
                other.a.set(0, 0, other.a.get(0, 0) + &Poly::one());
                prop_assert!(!connection_defect(b, &other).is_zero());
            }
        }
    }
}

#[test]
fn perturbed_transitions_name_a_simplex() {
    let gd = fixtures::unipotent_gl2(2);
    let mut bad = gd.clone();
    let c = bad.chi(0, 2).unwrap();
    let bump = Matrix::from_fn(c.rows(), c.cols(), |r, col| if r == 0 && col == 0 { Poly::one() } else { Poly::zero() });
    let g20 = bad.alpha(2, 0).unwrap();
    bad.set_chi(0, 2, c.add(&bump));
    bad.set_chi(2, 0, bad.chi(2, 0).unwrap().sub(&g20.mul(&bump)));
    let rep = verify_cocycles(&bad);
    // also breaks ∂G = −ad(χ)G on the edge itself, since gl2 is not abelian
    assert_eq!(rep.simplices(), vec![vec![0, 1, 2], vec![0, 2]]);
}
