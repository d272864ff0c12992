//! Exact symbolic scalars.
//!
//! [`Expr`] is always canonical: a reduced quotient of two polynomials in
//! atoms (variables and `sin`/`cos`/`exp`/`log` applications) with rational
//! coefficients, normalized modulo `sin(u)^2 + cos(u)^2 = 1`. Structural
//! equality of two `Expr` values is therefore mathematical equality for
//! rational functions, and the Pythagorean identity is applied on every
//! construction. Raw, unsimplified syntax trees are [`Ast`] values.

mod ast;
mod factor;
mod parse;
pub mod poly;
mod probe;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use ast::Ast;
pub use factor::{factor, PolyFactors};
pub(crate) use parse::{Parser, Tok};
pub use parse::parse_ast;
pub use poly::{Atom, Poly, Q};
pub use probe::{is_zero, Probe, Value, ZeroTest};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            _ => None,
        }
    }

    pub fn eval_f64(self, x: f64) -> Result<f64> {
        match self {
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
            Func::Exp => Ok(x.exp()),
            Func::Log if x > 0.0 => Ok(x.ln()),
            Func::Log => Err(Error::Domain(format!("log of non-positive value {x}"))),
        }
    }
}

/// Canonical rational function in atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::from_poly(Poly::from_int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Expr::from_q(Q::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_q(q: Q) -> Self {
        Expr::from_poly(Poly::constant(q))
    }

    pub fn var(name: &str) -> Self {
        Expr::from_poly(Poly::var(name))
    }

    pub fn sin(arg: Expr) -> Self {
        Expr::apply(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Self {
        Expr::apply(Func::Cos, arg)
    }

    pub fn exp(arg: Expr) -> Self {
        Expr::apply(Func::Exp, arg)
    }

    pub fn log(arg: Expr) -> Self {
        Expr::apply(Func::Log, arg)
    }

    /// Apply an elementary function, folding `sin(0)`, `cos(0)`, `exp(0)`,
    /// `log(1)` and normalizing odd/even parity of `sin`/`cos`.
    pub fn apply(func: Func, arg: Expr) -> Self {
        let negative = arg.num.display_leading_coeff().is_negative();
        match func {
            Func::Sin if arg.is_zero() => Expr::zero(),
            Func::Cos | Func::Exp if arg.is_zero() => Expr::one(),
            Func::Log if arg.is_one() => Expr::zero(),
            Func::Sin if negative => -Expr::apply(Func::Sin, -arg),
            Func::Cos if negative => Expr::apply(Func::Cos, -arg),
            _ => Expr::from_poly(Poly::atom(Atom::Fn(func, Box::new(arg)))),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr { num: p.reduce_trig(), den: Poly::one() }
    }

    /// Canonicalize `num / den`.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        let num = num.reduce_trig();
        let den = den.reduce_trig();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        if let Some(c) = den.as_constant() {
            return Ok(Expr { num: num.scale(&c.recip()), den: Poly::one() });
        }
        let g = poly::gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let (q, den) = den.primitive_integer();
        Ok(Expr { num: num.scale(&q.recip()), den })
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    /// True iff the canonical form is the literal `0`.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one() && !self.has_transcendental()
    }

    pub fn has_transcendental(&self) -> bool {
        self.num.has_fn_atoms() || self.den.has_fn_atoms()
    }

    /// Variables occurring anywhere, including inside function arguments.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in self.num.atoms().into_iter().chain(self.den.atoms()) {
            match a {
                Atom::Var(v) => {
                    out.insert(v);
                }
                Atom::Fn(_, arg) => out.extend(arg.free_vars()),
            }
        }
        out
    }

    pub fn depends_on(&self, v: &str) -> bool {
        self.free_vars().contains(v)
    }

    pub fn add_ref(&self, other: &Expr) -> Expr {
        if self.den.is_one() && other.den.is_one() {
            return Expr::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            return Expr::from_parts(self.num.add(&other.num), self.den.clone())
                .expect("nonzero denominator");
        }
        Expr::from_parts(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .expect("product of nonzero denominators")
    }

    pub fn mul_ref(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Expr::from_poly(self.num.mul(&other.num));
        }
        Expr::from_parts(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("product of nonzero denominators")
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Expr::from_parts(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn recip(&self) -> Result<Expr> {
        Expr::one().checked_div(self)
    }

    pub fn scale_q(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, k: i64) -> Result<Expr> {
        let e = u32::try_from(k.unsigned_abs())
            .map_err(|_| Error::Unsupported(format!("exponent {k} too large")))?;
        let raised = Expr::from_parts(self.num.pow(e), self.den.pow(e))?;
        if k < 0 {
            raised.recip()
        } else {
            Ok(raised)
        }
    }

    /// Partial derivative with respect to the variable `v`.
    pub fn diff(&self, v: &str) -> Expr {
        let dn = poly_diff(&self.num, v);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_diff(&self.den, v);
        if dn.is_zero() && dd.is_zero() {
            return Expr::zero();
        }
        let num = Expr::from_poly(self.num.clone());
        let den = Expr::from_poly(self.den.clone());
        let top = &(&dn * &den) - &(&num * &dd);
        top.checked_div(&(&den * &den)).expect("denominator is nonzero")
    }

    /// Simultaneous substitution of variables.
    pub fn subst(&self, bindings: &BTreeMap<String, Expr>) -> Result<Expr> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let n = subst_poly(&self.num, bindings)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = subst_poly(&self.den, bindings)?;
        n.checked_div(&d)
    }

    pub fn subst_var(&self, v: &str, value: &Expr) -> Result<Expr> {
        let mut b = BTreeMap::new();
        b.insert(v.to_string(), value.clone());
        self.subst(&b)
    }

    /// Square root when `self` is a perfect square of a rational function
    /// (positive branch of every factor).
    pub fn sqrt_exact(&self) -> Option<Expr> {
        let n = sqrt_poly(&self.num)?;
        let d = sqrt_poly(&self.den)?;
        Expr::from_parts(n.num, d.num).ok()
    }

    pub fn to_ast(&self) -> Ast {
        if self.den.is_one() {
            poly_ast(&self.num)
        } else {
            Ast::Div(Box::new(poly_ast(&self.num)), Box::new(poly_ast(&self.den)))
        }
    }
}

fn sqrt_poly(p: &Poly) -> Option<Expr> {
    let f = factor(p);
    if f.unit.is_negative() {
        return None;
    }
    let root_unit = sqrt_q(&f.unit)?;
    let mut acc = Poly::constant(root_unit);
    for (g, m) in &f.factors {
        if m % 2 != 0 {
            return None;
        }
        acc = acc.mul(&g.pow(m / 2));
    }
    Some(Expr::from_poly(acc))
}

fn sqrt_q(q: &Q) -> Option<Q> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

fn atom_diff(a: &Atom, v: &str) -> Expr {
    match a {
        Atom::Var(name) if name == v => Expr::one(),
        Atom::Var(_) => Expr::zero(),
        Atom::Fn(func, arg) => {
            let du = arg.diff(v);
            if du.is_zero() {
                return Expr::zero();
            }
            let outer = match func {
                Func::Sin => Expr::cos((**arg).clone()),
                Func::Cos => -Expr::sin((**arg).clone()),
                Func::Exp => Expr::exp((**arg).clone()),
                Func::Log => match arg.recip() {
                    Ok(r) => r,
                    Err(_) => return Expr::zero(),
                },
            };
            &outer * &du
        }
    }
}

fn poly_diff(p: &Poly, v: &str) -> Expr {
    let mut acc = Expr::zero();
    for a in p.atoms() {
        let da = atom_diff(&a, v);
        if da.is_zero() {
            continue;
        }
        acc = &acc + &(&Expr::from_poly(p.derivative(&a)) * &da);
    }
    acc
}

fn subst_poly(p: &Poly, bindings: &BTreeMap<String, Expr>) -> Result<Expr> {
    let mut values: BTreeMap<&Atom, Expr> = BTreeMap::new();
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut term = Expr::from_q(c.clone());
        for (a, e) in m.factors() {
            if !values.contains_key(a) {
                let v = match a {
                    Atom::Var(name) => bindings.get(name).cloned().unwrap_or_else(|| Expr::var(name)),
                    Atom::Fn(func, arg) => Expr::apply(*func, arg.subst(bindings)?),
                };
                values.insert(a, v);
            }
            term = &term * &values[a].pow(*e as i64)?;
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

fn atom_ast(a: &Atom) -> Ast {
    match a {
        Atom::Var(v) => Ast::Var(v.clone()),
        Atom::Fn(f, arg) => Ast::Call(*f, Box::new(arg.to_ast())),
    }
}

fn poly_ast(p: &Poly) -> Ast {
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|a, b| poly::display_cmp(a.0, b.0));
    let mut out: Vec<Ast> = terms
        .into_iter()
        .map(|(m, c)| {
            let mut factors: Vec<Ast> = m
                .factors()
                .iter()
                .map(|(a, e)| if *e == 1 { atom_ast(a) } else { Ast::Pow(Box::new(atom_ast(a)), *e as i64) })
                .collect();
            if factors.is_empty() {
                return Ast::Num(c.clone());
            }
            if !c.is_one() {
                factors.insert(0, Ast::Num(c.clone()));
            }
            if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Ast::Mul(factors)
            }
        })
        .collect();
    match out.len() {
        0 => Ast::Num(Q::zero()),
        1 => out.pop().unwrap(),
        _ => Ast::Add(out),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ast())
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ast(s)?.simplify()
    }
}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                ops::$tr::$m(&self, &rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                ops::$tr::$m(&self, rhs)
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                ops::$tr::$m(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_ref(b));
binop!(Sub, sub, |a, b| a.add_ref(&-b));
binop!(Mul, mul, |a, b| a.mul_ref(b));
// Panics on a zero divisor, like integer division; use `checked_div` otherwise.
binop!(Div, div, |a, b| a.checked_div(b).expect("division by zero"));

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { num: self.num.neg(), den: self.den.clone() }
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

/// `∂e/∂v`; identical to [`Expr::diff`].
pub fn differentiate(e: &Expr, v: &str) -> Expr {
    e.diff(v)
}

/// Simultaneous substitution; identical to [`Expr::subst`].
pub fn substitute(e: &Expr, bindings: &BTreeMap<String, Expr>) -> Result<Expr> {
    e.subst(bindings)
}

/// Parse and canonicalize an expression.
pub fn parse_expr(text: &str) -> Result<Expr> {
    text.parse()
}
