//! Factorization over the rationals: content extraction, square-free
//! decomposition (Yun) per main atom, then splitting of square-free parts by
//! factors that are linear in some atom. A square-free factor with no linear
//! factor in any atom is returned unsplit.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{gcd, Atom, Poly, Q};

/// `unit * prod(f^m)`; factors are integral, primitive, positive-leading.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFactors {
    pub unit: Q,
    pub factors: Vec<(Poly, u32)>,
}

impl PolyFactors {
    pub fn expand(&self) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit.clone()), |acc, (f, m)| acc.mul(&f.pow(*m)))
    }
}

const CANDIDATE_CAP: usize = 4096;

pub fn factor(p: &Poly) -> PolyFactors {
    if p.is_zero() {
        return PolyFactors { unit: Q::zero(), factors: Vec::new() };
    }
    let mut acc: BTreeMap<Poly, u32> = BTreeMap::new();
    factor_into(p, 1, &mut acc);
    let factors: Vec<(Poly, u32)> = acc.into_iter().collect();
    let prod = factors.iter().fold(Poly::one(), |a, (f, m)| a.mul(&f.pow(*m)));
    let unit = p
        .exact_div(&prod)
        .and_then(|q| q.as_constant())
        .expect("factors multiply back to the input up to a constant");
    PolyFactors { unit, factors }
}

fn factor_into(p: &Poly, mult: u32, acc: &mut BTreeMap<Poly, u32>) {
    if p.is_constant() {
        return;
    }
    let x = p.max_atom().expect("non-constant");
    let cont = p.content_in(&x);
    let pp = p.exact_div(&cont).expect("content divides");
    factor_into(&cont, mult, acc);
    for (s, m) in squarefree_in(&pp, &x) {
        for f in split(&s) {
            *acc.entry(f.normalized()).or_insert(0) += m * mult;
        }
    }
}

/// Yun's algorithm in `x`; `f` must be primitive in `x`.
fn squarefree_in(f: &Poly, x: &Atom) -> Vec<(Poly, u32)> {
    if f.degree_in(x) == 0 {
        return if f.is_constant() { Vec::new() } else { vec![(f.clone(), 1)] };
    }
    let fp = f.derivative(x);
    let a0 = gcd(f, &fp);
    let mut b = f.exact_div(&a0).expect("gcd divides f");
    let c = fp.exact_div(&a0).expect("gcd divides f'");
    let mut d = c.sub(&b.derivative(x));
    let mut out = Vec::new();
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d);
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.exact_div(&a).expect("gcd divides b");
        let c = d.exact_div(&a).expect("gcd divides d");
        d = c.sub(&b.derivative(x));
        i += 1;
    }
    out
}

fn split(s: &Poly) -> Vec<Poly> {
    let s = s.normalized();
    if s.is_constant() {
        return Vec::new();
    }
    let atoms = s.atoms();
    for v in &atoms {
        let c = s.content_in(v);
        if !c.is_constant() {
            let rest = s.exact_div(&c).expect("content divides");
            let mut out = split(&c);
            out.extend(split(&rest));
            return out;
        }
    }
    if atoms.iter().any(|v| s.degree_in(v) == 1) {
        return vec![s];
    }
    for v in &atoms {
        if let Some(f) = linear_factor(&s, v) {
            let rest = s.exact_div(&f).expect("found factor divides");
            let mut out = vec![f.normalized()];
            out.extend(split(&rest));
            return out;
        }
    }
    vec![s]
}

/// Search for a factor `a*v + b` with `a | lc_v(s)` and `b | tc_v(s)`.
fn linear_factor(s: &Poly, v: &Atom) -> Option<Poly> {
    let coeffs = s.coeffs_in(v);
    let lead = coeffs.last()?;
    let tail = &coeffs[0];
    if tail.is_zero() {
        return Some(Poly::atom(v.clone()));
    }
    let leads = divisors(lead);
    let tails = divisors(tail);
    let x = Poly::atom(v.clone());
    let mut tried = 0;
    for a in &leads {
        let ax = a.mul(&x);
        for b in &tails {
            for cand in [ax.add(b), ax.sub(b)] {
                tried += 1;
                if tried > CANDIDATE_CAP {
                    return None;
                }
                if s.exact_div(&cand).is_some() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Divisors of an integral polynomial up to sign.
fn divisors(p: &Poly) -> Vec<Poly> {
    let f = factor(p);
    let mut out: Vec<Poly> = int_divisors(&f.unit).into_iter().map(|d| Poly::constant(Q::from_integer(d))).collect();
    for (g, m) in &f.factors {
        let mut next = Vec::new();
        for d in &out {
            let mut pw = Poly::one();
            for _ in 0..=*m {
                next.push(d.mul(&pw));
                pw = pw.mul(g);
            }
        }
        out = next;
        if out.len() > CANDIDATE_CAP {
            out.truncate(CANDIDATE_CAP);
            break;
        }
    }
    out.sort_by_key(|d| (d.total_degree(), d.len()));
    out
}

fn int_divisors(q: &Q) -> Vec<BigInt> {
    let n = q.numer().abs();
    if !q.is_integer() || n.is_zero() {
        return vec![BigInt::one()];
    }
    let Some(small) = n.to_u64() else {
        return vec![BigInt::one(), n];
    };
    let mut out = Vec::new();
    let root = small.sqrt();
    let limit = root.min(1_000_000);
    for d in 1..=limit {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d != small / d {
                out.push(BigInt::from(small / d));
            }
        }
    }
    if limit < root {
        out.push(n);
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Expr;

    fn p(s: &str) -> Poly {
        let e: Expr = s.parse().unwrap();
        assert!(e.denom().is_one());
        e.numer().clone()
    }

    fn factor_strings(s: &str) -> Vec<(String, u32)> {
        let f = factor(&p(s));
        assert_eq!(f.expand(), p(s));
        let mut v: Vec<_> = f
            .factors
            .iter()
            .map(|(g, m)| (Expr::from_poly(g.clone()).to_string(), *m))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(factor_strings("x^2 - y^2"), vec![("x + y".into(), 1), ("x - y".into(), 1)]);
    }

    #[test]
    fn repeated_and_monomial_factors() {
        assert_eq!(factor_strings("3*x^3*y - 3*x^2*y"), vec![("x".into(), 2), ("x - 1".into(), 1), ("y".into(), 1)]);
        assert_eq!(factor_strings("(x + y)^3*(x - 2)"), vec![("x + y".into(), 3), ("x - 2".into(), 1)]);
    }

    #[test]
    fn rational_roots_of_univariate() {
        assert_eq!(factor_strings("6*x^2 - 5*x + 1"), vec![("2*x - 1".into(), 1), ("3*x - 1".into(), 1)]);
    }

    #[test]
    fn irreducible_stays_whole() {
        assert_eq!(factor_strings("x^2 + 1"), vec![("x^2 + 1".into(), 1)]);
        assert_eq!(factor_strings("x^2 + y^2 + 1"), vec![("x^2 + y^2 + 1".into(), 1)]);
    }

    #[test]
    fn constants_have_no_factors() {
        let f = factor(&p("-7/2"));
        assert!(f.factors.is_empty());
        assert_eq!(f.unit, Q::new((-7).into(), 2.into()));
    }
}
