//! Sparse multivariate polynomials over the rationals.
//!
//! Indeterminates are [`Atom`]s: plain variables or applications of an
//! elementary function to a canonical argument. Treating function
//! applications as opaque indeterminates turns every expression into a
//! rational function in atoms, which is what the canonical [`Expr`] stores.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Expr, Func};

pub type Q = BigRational;

/// An indeterminate of the polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(String),
    Fn(Func, Box<Expr>),
}

impl Atom {
    pub fn is_var(&self) -> bool {
        matches!(self, Atom::Var(_))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(name) => f.write_str(name),
            Atom::Fn(func, arg) => write!(f, "{}({})", func.name(), arg),
        }
    }
}

/// Power product of atoms, sorted by atom with strictly positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(Vec<(Atom, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn atom(a: Atom, exp: u32) -> Self {
        if exp == 0 {
            Mono::one()
        } else {
            Mono(vec![(a, exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    /// Split off the power of `a`.
    pub fn without(&self, a: &Atom) -> (u32, Mono) {
        let mut exp = 0;
        let rest = self
            .0
            .iter()
            .filter(|(b, e)| {
                if b == a {
                    exp = *e;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (exp, Mono(rest))
    }

    fn from_sorted(v: Vec<(Atom, u32)>) -> Mono {
        Mono(v.into_iter().filter(|(_, e)| *e > 0).collect())
    }
}

/// Graded order used for display: higher total degree first, then the
/// monomial with the larger exponent on the earliest atom.
pub fn display_cmp(a: &Mono, b: &Mono) -> Ordering {
    b.total_degree().cmp(&a.total_degree()).then_with(|| {
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.0.get(i), b.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some((x, ex)), Some((y, ey))) => match x.cmp(y) {
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => {
                        if ex != ey {
                            return ey.cmp(ex);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(Q::from_integer(BigInt::from(n)))
    }

    pub fn atom(a: Atom) -> Self {
        Poly::monomial(Mono::atom(a, 1), Q::one())
    }

    pub fn var(name: &str) -> Self {
        Poly::atom(Atom::Var(name.to_string()))
    }

    pub fn monomial(m: Mono, c: Q) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The constant value if the polynomial has no atoms (zero included).
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(a, _)| a.clone()))
            .collect()
    }

    pub fn max_atom(&self) -> Option<Atom> {
        self.terms
            .keys()
            .filter_map(|m| m.0.last().map(|(a, _)| a))
            .max()
            .cloned()
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.terms.keys().any(|m| m.exponent(a) > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::total_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(a)).max().unwrap_or(0)
    }

    /// Leading term under the (arbitrary but fixed) `Mono` order.
    pub fn leading(&self) -> Option<(&Mono, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Q {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)
    }

    /// Coefficient of the term printed first; fixes sign normalization.
    pub fn display_leading_coeff(&self) -> Q {
        self.terms
            .iter()
            .min_by(|a, b| display_cmp(a.0, b.0))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_mono(&self, mono: &Mono, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.mul(mono), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut out = Poly::zero();
        for (m1, c1) in &small.terms {
            for (m2, c2) in &big.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut exp: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Coefficients in `a`: entry `i` multiplies `a^i`.
    pub fn coeffs_in(&self, a: &Atom) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(a) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.without(a);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs(a: &Atom, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (i, p) in coeffs.iter().enumerate() {
            let m = Mono::atom(a.clone(), i as u32);
            for (mm, c) in &p.terms {
                out.add_term(mm.mul(&m), c.clone());
            }
        }
        out
    }

    /// Partial derivative with respect to an atom treated as independent.
    pub fn derivative(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(a);
            if e == 0 {
                continue;
            }
            let v = m
                .0
                .iter()
                .map(|(b, k)| if b == a { (b.clone(), k - 1) } else { (b.clone(), *k) })
                .collect();
            out.add_term(Mono::from_sorted(v), c * Q::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let x = d.max_atom().expect("non-constant polynomial has an atom");
        let dc = d.coeffs_in(&x);
        let db = dc.len() - 1;
        let mut rem = self.coeffs_in(&x);
        if rem.len() < dc.len() {
            return None;
        }
        let mut quot = vec![Poly::zero(); rem.len() - db];
        for i in (db..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = rem[i].exact_div(&dc[db])?;
            for j in 0..=db {
                rem[i - db + j] = rem[i - db + j].sub(&q.mul(&dc[j]));
            }
            quot[i - db] = q;
        }
        if rem.iter().all(Poly::is_zero) {
            Some(Poly::from_coeffs(&x, &quot))
        } else {
            None
        }
    }

    /// Write `self = q * p` with `p` integral, primitive, positive leading
    /// coefficient. Zero maps to `(0, 0)`.
    pub fn primitive_integer(&self) -> (Q, Poly) {
        if self.is_zero() {
            return (Q::zero(), Poly::zero());
        }
        let mut lcm_den = BigInt::one();
        for c in self.terms.values() {
            lcm_den = lcm_den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&lcm_den / c.denom());
            g = g.gcd(&n);
        }
        let mut q = Q::new(g, lcm_den);
        if self.display_leading_coeff().is_negative() {
            q = -q;
        }
        let p = self.scale(&q.recip());
        (q, p)
    }

    pub fn normalized(&self) -> Poly {
        self.primitive_integer().1
    }

    /// Content with respect to `a`: gcd of the coefficients in `a`.
    pub fn content_in(&self, a: &Atom) -> Poly {
        self.coeffs_in(a)
            .iter()
            .fold(Poly::zero(), |g, c| gcd(&g, c))
    }

    pub fn has_fn_atoms(&self) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(a, _)| !a.is_var()))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Rewrite every `sin(u)^k`, `k >= 2`, via `sin(u)^2 = 1 - cos(u)^2`.
    /// The result is the unique normal form modulo the Pythagorean relations.
    pub fn reduce_trig(&self) -> Poly {
        let needs = self
            .terms
            .keys()
            .any(|m| m.0.iter().any(|(a, e)| *e >= 2 && matches!(a, Atom::Fn(Func::Sin, _))));
        if !needs {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = Poly::one();
            for (a, e) in &m.0 {
                match a {
                    Atom::Fn(Func::Sin, arg) if *e >= 2 => {
                        if e % 2 == 1 {
                            kept.push((a.clone(), 1));
                        }
                        let cos = Poly::atom(Atom::Fn(Func::Cos, arg.clone()));
                        let one_minus = Poly::one().sub(&cos.mul(&cos));
                        factor = factor.mul(&one_minus.pow(e / 2));
                    }
                    _ => kept.push((a.clone(), *e)),
                }
            }
            let rest = Mono(kept);
            for (fm, fc) in &factor.terms {
                out.add_term(fm.mul(&rest), fc * c);
            }
        }
        out
    }
}

fn prem(f: &[Poly], g: &[Poly]) -> Vec<Poly> {
    let dg = g.len() - 1;
    let lg = &g[dg];
    let mut r: Vec<Poly> = f.to_vec();
    loop {
        while r.last().is_some_and(Poly::is_zero) {
            r.pop();
        }
        if r.len() < g.len() {
            return r;
        }
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - dg;
        for c in r.iter_mut() {
            *c = c.mul(lg);
        }
        for (j, gc) in g.iter().enumerate() {
            r[shift + j] = r[shift + j].sub(&lr.mul(gc));
        }
    }
}

fn primitive_part_vec(v: &[Poly]) -> Vec<Poly> {
    let cont = v.iter().fold(Poly::zero(), |g, c| gcd(&g, c));
    v.iter()
        .map(|c| c.exact_div(&cont).expect("content divides every coefficient"))
        .collect()
}

/// Greatest common divisor, normalized to an integral primitive polynomial
/// with positive leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let x = match (a.max_atom(), b.max_atom()) {
        (Some(p), Some(q)) => p.max(q),
        _ => unreachable!(),
    };
    let da = a.degree_in(&x);
    let db = b.degree_in(&x);
    if da == 0 {
        return gcd(a, &b.content_in(&x));
    }
    if db == 0 {
        return gcd(&a.content_in(&x), b);
    }
    let ac = a.coeffs_in(&x);
    let bc = b.coeffs_in(&x);
    let ca = ac.iter().fold(Poly::zero(), |g, c| gcd(&g, c));
    let cb = bc.iter().fold(Poly::zero(), |g, c| gcd(&g, c));
    let g = gcd(&ca, &cb);
    let mut f = primitive_part_vec(&ac);
    let mut h = primitive_part_vec(&bc);
    if f.len() < h.len() {
        std::mem::swap(&mut f, &mut h);
    }
    let h_final = loop {
        let r = prem(&f, &h);
        if r.is_empty() {
            break h;
        }
        if r.len() == 1 {
            break vec![Poly::one()];
        }
        f = h;
        h = primitive_part_vec(&r);
    };
    let h_poly = Poly::from_coeffs(&x, &primitive_part_vec(&h_final));
    g.mul(&h_poly).normalized()
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var("x")
    }
    fn y() -> Poly {
        Poly::var("y")
    }

    #[test]
    fn exact_division_multivariate() {
        let a = x().sub(&y());
        let b = x().add(&y());
        let p = a.mul(&b);
        assert_eq!(p.exact_div(&a), Some(b.clone()));
        assert_eq!(p.exact_div(&b), Some(a));
        assert_eq!(p.exact_div(&x()), None);
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let common = x().mul(&y()).add(&Poly::one());
        let a = common.mul(&x().add(&Poly::from_int(2)));
        let b = common.mul(&y().sub(&Poly::from_int(3))).mul(&y());
        assert_eq!(gcd(&a, &b), common);
        assert!(gcd(&x(), &y()).is_one());
    }

    #[test]
    fn gcd_with_rational_content() {
        let a = x().scale(&Q::new(1.into(), 2.into())).mul(&y());
        let b = x().scale(&int(6)).mul(&x());
        assert_eq!(gcd(&a, &b), x());
    }

    #[test]
    fn primitive_integer_clears_denominators() {
        let p = x().scale(&Q::new((-2).into(), 3.into())).add(&Poly::constant(Q::new(4.into(), 9.into())));
        let (q, prim) = p.primitive_integer();
        assert_eq!(prim.scale(&q), p);
        assert!(prim.display_leading_coeff() > Q::zero());
        assert!(prim.terms().all(|(_, c)| c.is_integer()));
    }

    #[test]
    fn display_order_is_graded() {
        let mut monos = [Mono::one(),
            Mono::atom(Atom::Var("x".into()), 1),
            Mono::atom(Atom::Var("x".into()), 2),
            Mono::atom(Atom::Var("x".into()), 1).mul(&Mono::atom(Atom::Var("y".into()), 1))];
        monos.sort_by(display_cmp);
        assert_eq!(monos[0], Mono::atom(Atom::Var("x".into()), 2));
        assert!(monos[3].is_one());
    }
}
