use std::collections::BTreeMap;

use formcalc_core::evolution::{
    attempt_degenerate_transformation, build_relation, nonidentity_check, poincare_antiderivative, TransformOutcome,
    Verdict,
};
use formcalc_core::manifold::two_form_component;
use formcalc_core::random;
use formcalc_core::{BalanceSystem, Coords, Expr, Probe};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gradient_fields_give_identical_relations(seed: u64, n in 1usize..=4) {
        let c = Coords::standard(n);
        let psi0 = random::poly(&mut rng(seed), c.names(), 3, 4);
        let a: Vec<Expr> = c.names().iter().map(|x| psi0.diff(x)).collect();
        let r = build_relation(&BalanceSystem::new(c, a, "psi")).unwrap();
        prop_assert_eq!(nonidentity_check(&r), Verdict::Identical);
    }

    #[test]
    fn homotopy_round_trip(seed: u64, n in 1usize..=4, p in 0usize..=2) {
        let c = Coords::standard(n);
        let theta0 = random::form(&mut rng(seed), &c, p.min(n - 1), 3);
        let omega = theta0.d_flat();
        prop_assume!(!omega.is_zero());
        prop_assert_eq!(poincare_antiderivative(&omega).unwrap().d_flat(), omega);
    }

    #[test]
    fn restriction_round_trip_and_no_mutation(seed: u64, n in 2usize..=3) {
        let c = Coords::standard(n);
        let mut r = rng(seed);
        let a: Vec<Expr> = (0..n).map(|_| random::poly(&mut r, c.names(), 2, 3)).collect();
        let rel = build_relation(&BalanceSystem::new(c.clone(), a, "psi")).unwrap();
        let before = rel.clone();
        let pi = random::pseudostructure(&mut r, &c, 1, 2);
        let out = attempt_degenerate_transformation(&rel, &pi, &Probe::default()).unwrap();
        prop_assert_eq!(&rel, &before);
        match out {
            TransformOutcome::Identical(ir) => {
                prop_assert_eq!(ir.antiderivative.unwrap().d_flat(), ir.restricted);
            }
            TransformOutcome::NotClosed(_) => prop_assert!(false, "1-forms on curves are always closed"),
        }
    }
}

#[test]
fn commutator_matches_numeric_curl() {
    let c = Coords::new(["xi1", "xi2"]).unwrap();
    let a: Vec<Expr> = ["xi2^2*xi1 + sin(xi1)", "exp(xi1/3)*xi2 - xi1^3"].iter().map(|s| s.parse().unwrap()).collect();
    let rel = build_relation(&BalanceSystem::new(c, a.clone(), "psi")).unwrap();
    let k12 = two_form_component(&rel.commutator.total, 0, 1);
    let probe = Probe::with_seed(11);
    let mut r = probe.rng();
    let names = vec!["xi1".to_string(), "xi2".to_string()];
    let h = 1e-5;
    for _ in 0..20 {
        let pt: BTreeMap<String, f64> = Probe::sample_point(&mut r, &names)
            .into_iter()
            .map(|(k, q)| (k, num_traits::ToPrimitive::to_f64(&q).unwrap()))
            .collect();
        let shifted = |v: &str, d: f64| {
            let mut p = pt.clone();
            *p.get_mut(v).unwrap() += d;
            p
        };
        let d1a2 = (a[1].eval_f64(&shifted("xi1", h)).unwrap() - a[1].eval_f64(&shifted("xi1", -h)).unwrap()) / (2.0 * h);
        let d2a1 = (a[0].eval_f64(&shifted("xi2", h)).unwrap() - a[0].eval_f64(&shifted("xi2", -h)).unwrap()) / (2.0 * h);
        let numeric = d1a2 - d2a1;
        let exact = k12.eval_f64(&pt).unwrap();
        assert!((exact - numeric).abs() <= 1e-6 * exact.abs().max(1.0), "{exact} vs {numeric}");
    }
}
