//! Seeded random polynomial fixtures for property checks and benchmarks.

use rand::Rng;

use crate::forms::{Coords, Form, MultiIndex};
use crate::manifold::Connection;
use crate::pseudostructure::Pseudostructure;
use crate::symexpr::{Expr, Poly};

/// Sum of up to `max_terms` monomials of total degree ≤ `max_deg` with
/// integer coefficients in `[-5, 5]`.
pub fn poly(rng: &mut impl Rng, vars: &[String], max_deg: u32, max_terms: usize) -> Expr {
    let mut p = Poly::zero();
    for _ in 0..rng.random_range(1..=max_terms.max(1)) {
        let c = rng.random_range(-5i64..=5);
        let mut term = Poly::from_int(c);
        let deg = rng.random_range(0..=max_deg);
        for _ in 0..deg {
            if vars.is_empty() {
                break;
            }
            let v = &vars[rng.random_range(0..vars.len())];
            term = term.mul(&Poly::var(v));
        }
        p = p.add(&term);
    }
    Expr::from_poly(p)
}

/// Random degree-`p` form with polynomial coefficients over its own
/// coordinates; each basis element is present with probability 2/3.
pub fn form(rng: &mut impl Rng, coords: &Coords, p: usize, max_deg: u32) -> Form {
    let vars = coords.names().to_vec();
    let mut terms = Vec::new();
    for i in MultiIndex::all(coords.len(), p) {
        if rng.random_range(0..3) > 0 {
            terms.push((i.indices().to_vec(), poly(rng, &vars, max_deg, 3)));
        }
    }
    Form::from_terms(coords, p, terms).expect("indices in range")
}

/// Random connection with polynomial entries; `symmetric` enforces
/// `Γ^s_{ba} = Γ^s_{ab}`.
pub fn connection(rng: &mut impl Rng, coords: &Coords, max_deg: u32, symmetric: bool) -> Connection {
    let n = coords.len();
    let vars = coords.names().to_vec();
    let mut c = Connection::zero(n);
    for s in 0..n {
        for b in 0..n {
            for a in 0..n {
                if symmetric && a < b {
                    continue;
                }
                let g = if rng.random_range(0..2) == 0 { Expr::zero() } else { poly(rng, &vars, max_deg, 2) };
                c.set(s, b, a, g.clone());
                if symmetric {
                    c.set(s, a, b, g);
                }
            }
        }
    }
    c
}

/// Polynomial immersion of `k` parameters `t1…tk`; retried until the
/// Jacobian has full generic rank.
pub fn pseudostructure(rng: &mut impl Rng, ambient: &Coords, k: usize, max_deg: u32) -> Pseudostructure {
    let params = Coords::new((1..=k).map(|i| format!("t{i}"))).expect("valid names");
    let names = params.names().to_vec();
    loop {
        let map: Vec<Expr> = (0..ambient.len()).map(|_| poly(rng, &names, max_deg, 3)).collect();
        if let Ok(pi) = Pseudostructure::new(params.clone(), ambient.clone(), map) {
            return pi;
        }
    }
}
