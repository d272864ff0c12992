use formcalc_core::random;
use formcalc_core::{parse_form, Coords, Expr, Form, ZeroTest};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rand_form(seed: u64, n: usize, p: usize) -> Form {
    random::form(&mut ChaCha8Rng::seed_from_u64(seed), &Coords::standard(n), p, 3)
}

fn graded(sign_exp: usize, f: Form) -> Form {
    if sign_exp.is_multiple_of(2) {
        f
    } else {
        f.neg()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_is_zero(seed: u64, n in 1usize..=4, p in 0usize..=3) {
        let w = rand_form(seed, n, p.min(n));
        prop_assert!(w.d_flat().d_flat().is_zero());
    }

    #[test]
    fn wedge_is_graded_commutative(s1: u64, s2: u64, n in 1usize..=4, p in 0usize..=3, q in 0usize..=3) {
        let a = rand_form(s1, n, p.min(n));
        let b = rand_form(s2, n, q.min(n));
        prop_assert_eq!(a.wedge(&b).unwrap(), graded(a.degree() * b.degree(), b.wedge(&a).unwrap()));
    }

    #[test]
    fn leibniz_rule(s1: u64, s2: u64, n in 1usize..=4, p in 0usize..=2, q in 0usize..=2) {
        let a = rand_form(s1, n, p.min(n));
        let b = rand_form(s2, n, q.min(n));
        let lhs = a.wedge(&b).unwrap().d_flat();
        let rhs = a.d_flat().wedge(&b).unwrap().add(&graded(a.degree(), a.wedge(&b.d_flat()).unwrap())).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_is_associative(s: u64, n in 1usize..=4, p in 0usize..=2, q in 0usize..=2, r in 0usize..=1) {
        let a = rand_form(s, n, p.min(n));
        let b = rand_form(s ^ 0x55, n, q.min(n));
        let c = rand_form(s ^ 0xaa, n, r.min(n));
        prop_assert_eq!(a.wedge(&b).unwrap().wedge(&c).unwrap(), a.wedge(&b.wedge(&c).unwrap()).unwrap());
    }

    #[test]
    fn print_parse_round_trip(s: u64, n in 1usize..=4, p in 0usize..=3) {
        let w = rand_form(s, n, p.min(n));
        prop_assert_eq!(parse_form(&w.to_string(), w.coords()).unwrap(), w);
    }

    #[test]
    fn scaling_distributes(s: u64, n in 1usize..=3) {
        let a = rand_form(s, n, 1);
        let b = rand_form(s.rotate_left(7), n, 1);
        let c: Expr = "x1 - 3".parse().unwrap();
        prop_assert_eq!(a.add(&b).unwrap().scale(&c), a.scale(&c).add(&b.scale(&c)).unwrap());
    }
}

#[test]
fn exact_forms_are_closed() {
    let c = Coords::standard(3);
    let f = Form::scalar(&c, "x1*x2*x3 + exp(x1)".parse().unwrap());
    assert_eq!(f.d_flat().is_closed_flat(), ZeroTest::Zero);
    let w = parse_form("(x2) dx1", &c).unwrap();
    assert_eq!(w.is_closed_flat(), ZeroTest::NonZero);
}

#[test]
fn wedge_fixtures() {
    let c = Coords::standard(3);
    let dx1 = parse_form("dx1", &c).unwrap();
    let dx2 = parse_form("dx2", &c).unwrap();
    assert_eq!(dx1.wedge(&dx2).unwrap(), dx2.wedge(&dx1).unwrap().neg());
    assert!(dx1.wedge(&dx1).unwrap().is_zero());
    let top = parse_form("dx1^dx2^dx3", &c).unwrap();
    let over = top.wedge(&dx1).unwrap();
    assert!(over.is_zero());
    assert_eq!(over.degree(), 4);
}
