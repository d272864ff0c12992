use std::collections::BTreeMap;

use formcalc_core::hodge::{delta, laplacian, star};
use formcalc_core::manifold::{commutator, d_evolutionary, is_deforming, torsion_commutator};
use formcalc_core::pseudostructure::{jacobian_determinant, poisson_bracket, pullback};
use formcalc_core::random;
use formcalc_core::{Coords, Expr, Form, LaplacianVariant, Manifold, Metric, Probe};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn euclid(n: usize) -> Manifold {
    Manifold::flat(n).with_metric(Metric::euclidean(n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn torsion_is_antisymmetric(seed: u64, n in 1usize..=3) {
        let c = Coords::standard(n);
        let m = Manifold::new(c.clone()).with_connection(random::connection(&mut rng(seed), &c, 2, false)).unwrap();
        let t = torsion_commutator(&m).unwrap();
        for s in 0..n {
            for a in 0..n {
                for b in 0..n {
                    prop_assert_eq!(t.get(s, a, b), &-t.get(s, b, a));
                }
            }
        }
    }

    #[test]
    fn commutator_report_is_additive(seed: u64, n in 2usize..=3) {
        let c = Coords::standard(n);
        let mut r = rng(seed);
        let m = Manifold::new(c.clone()).with_connection(random::connection(&mut r, &c, 1, false)).unwrap();
        let theta = random::form(&mut r, &c, 1, 2);
        let rep = commutator(&m, &theta).unwrap();
        prop_assert_eq!(rep.total, rep.coefficient_term.add(&rep.metric_term).unwrap());
    }

    #[test]
    fn symmetric_connections_act_like_flat_space(seed: u64, n in 1usize..=4, p in 0usize..=3) {
        let c = Coords::standard(n);
        let mut r = rng(seed);
        let m = Manifold::new(c.clone()).with_connection(random::connection(&mut r, &c, 2, true)).unwrap();
        prop_assert!(!is_deforming(&m));
        let theta = random::form(&mut r, &c, p.min(n), 2);
        prop_assert_eq!(d_evolutionary(&m, &theta).unwrap(), theta.d_flat());
    }

    #[test]
    fn star_is_linear(seed: u64, n in 1usize..=4, p in 0usize..=4) {
        let m = euclid(n);
        let mut r = rng(seed);
        let (a, b) = (random::form(&mut r, m.coords(), p.min(n), 2), random::form(&mut r, m.coords(), p.min(n), 2));
        let k: Expr = "x1 + 2".parse().unwrap();
        let lhs = star(&m, &a.scale(&k).add(&b).unwrap()).unwrap();
        let rhs = star(&m, &a).unwrap().scale(&k).add(&star(&m, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn codifferential_is_nilpotent(seed: u64, n in 1usize..=4, p in 1usize..=4) {
        let m = euclid(n);
        let w = random::form(&mut rng(seed), m.coords(), p.min(n), 3);
        prop_assert!(delta(&m, &delta(&m, &w).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn laplacian_on_functions_is_minus_sum_of_second_derivatives(seed: u64, n in 1usize..=4) {
        let m = euclid(n);
        let f = random::form(&mut rng(seed), m.coords(), 0, 3);
        let g = f.as_scalar().unwrap();
        let oracle: Expr = m.coords().names().iter().map(|x| g.diff(x).diff(x)).sum();
        let lap = laplacian(&m, &f, LaplacianVariant::Standard).unwrap();
        prop_assert_eq!(lap.as_scalar().unwrap(), -oracle);
    }

    #[test]
    fn pullback_commutes_with_d(seed: u64, n in 1usize..=4, k in 1usize..=3, p in 0usize..=3) {
        let amb = Coords::standard(n);
        let mut r = rng(seed);
        let pi = random::pseudostructure(&mut r, &amb, k.min(n), 2);
        let theta = random::form(&mut r, &amb, p.min(n), 2);
        prop_assert_eq!(pullback(&pi, &theta.d_flat()).unwrap(), pullback(&pi, &theta).unwrap().d_flat());
    }

    #[test]
    fn pullback_is_multiplicative(seed: u64, n in 2usize..=4, k in 1usize..=3) {
        let amb = Coords::standard(n);
        let mut r = rng(seed);
        let pi = random::pseudostructure(&mut r, &amb, k.min(n), 2);
        let a = random::form(&mut r, &amb, 1, 2);
        let b = random::form(&mut r, &amb, 1, 1);
        let lhs = pullback(&pi, &a.wedge(&b).unwrap()).unwrap();
        let rhs = pullback(&pi, &a).unwrap().wedge(&pullback(&pi, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn high_degree_forms_pull_back_to_zero(seed: u64, n in 2usize..=4) {
        let amb = Coords::standard(n);
        let mut r = rng(seed);
        let pi = random::pseudostructure(&mut r, &amb, 1, 2);
        let w = random::form(&mut r, &amb, 2, 2);
        prop_assert!(pullback(&pi, &w).unwrap().is_zero());
    }

    #[test]
    fn poisson_laws(s1: u64, s2: u64, s3: u64) {
        let c = Coords::new(["q1", "p1", "q2", "p2"]).unwrap();
        let vars = c.names().to_vec();
        let pairs = vec![("q1".to_string(), "p1".to_string()), ("q2".to_string(), "p2".to_string())];
        let f = random::poly(&mut rng(s1), &vars, 3, 3);
        let g = random::poly(&mut rng(s2), &vars, 3, 3);
        let h = random::poly(&mut rng(s3), &vars, 3, 3);
        let pb = |a: &Expr, b: &Expr| poisson_bracket(&c, a, b, &pairs).unwrap();
        prop_assert_eq!(pb(&f, &g), -pb(&g, &f));
        prop_assert_eq!(pb(&(&f * &g), &h), &(&f * &pb(&g, &h)) + &(&g * &pb(&f, &h)));
    }
}

fn affine(r: &mut ChaCha8Rng, inputs: &[String]) -> Vec<Expr> {
    (0..inputs.len())
        .map(|_| {
            let mut e = Expr::int(r.random_range(-3..=3));
            for v in inputs {
                e = &e + &(&Expr::int(r.random_range(-3..=3)) * &Expr::var(v));
            }
            e
        })
        .collect()
}

#[test]
fn jacobian_of_composition_is_product() {
    let mut r = rng(7);
    let names: Vec<String> = ["x1", "x2", "x3"].iter().map(|s| s.to_string()).collect();
    let probe = Probe::default();
    for _ in 0..10 {
        let f = affine(&mut r, &names);
        let g = affine(&mut r, &names);
        let sub: BTreeMap<String, Expr> = names.iter().cloned().zip(g.iter().cloned()).collect();
        let fg: Vec<Expr> = f.iter().map(|e| e.subst(&sub).unwrap()).collect();
        let jf = jacobian_determinant(&f, &names).unwrap().subst(&sub).unwrap();
        let jg = jacobian_determinant(&g, &names).unwrap();
        let jfg = jacobian_determinant(&fg, &names).unwrap();
        let mut pr = probe.rng();
        for _ in 0..4 {
            let pt = Probe::sample_point(&mut pr, &names);
            let lhs = jfg.eval_at(&pt).unwrap().to_f64();
            let rhs = (&jf * &jg).eval_at(&pt).unwrap().to_f64();
            assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
        }
    }
}

#[test]
fn lorentzian_double_star() {
    let m = Manifold::flat(4).with_metric(Metric::minkowski(4)).unwrap();
    for p in 0..=4 {
        for idx in formcalc_core::MultiIndex::all(4, p) {
            let b = Form::basis(m.coords(), idx.indices()).unwrap();
            let ss = star(&m, &star(&m, &b).unwrap()).unwrap();
            let expect = if (p * (4 - p) + 1) % 2 == 0 { b.clone() } else { b.neg() };
            assert_eq!(ss, expect);
        }
    }
}
