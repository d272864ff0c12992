//! Point evaluation and randomized zero testing.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Atom, Expr, Poly, Q};
use crate::error::{Error, Result};

/// Result of evaluating at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Q),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Value::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_zero(),
            Value::Float(x) => *x == 0.0,
        }
    }

    pub(crate) fn add(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Float(self.to_f64() + o.to_f64()),
        }
    }

    pub(crate) fn mul(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Float(self.to_f64() * o.to_f64()),
        }
    }

    pub(crate) fn div(&self, o: &Value) -> Result<Value> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a / b),
            _ => Value::Float(self.to_f64() / o.to_f64()),
        })
    }

    pub(crate) fn powi(&self, k: i64) -> Result<Value> {
        if k < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Value::Exact(q) => {
                let e = k.unsigned_abs() as usize;
                let p = num_traits::pow(q.clone(), e);
                Value::Exact(if k < 0 { p.recip() } else { p })
            }
            Value::Float(x) => Value::Float(x.powi(k as i32)),
        })
    }
}

fn eval_poly(p: &Poly, point: &BTreeMap<String, Q>) -> Result<Value> {
    let mut cache: BTreeMap<&Atom, Value> = BTreeMap::new();
    let mut acc = Value::Exact(Q::zero());
    for (m, c) in p.terms() {
        let mut term = Value::Exact(c.clone());
        for (a, e) in m.factors() {
            if !cache.contains_key(a) {
                let v = match a {
                    Atom::Var(v) => {
                        Value::Exact(point.get(v).cloned().ok_or_else(|| Error::UnboundVariable(v.clone()))?)
                    }
                    Atom::Fn(f, arg) => Value::Float(f.eval_f64(arg.eval_at(point)?.to_f64())?),
                };
                cache.insert(a, v);
            }
            term = term.mul(&cache[a].powi(*e as i64)?);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Sum of absolute term magnitudes; the scale for float cancellation.
fn magnitude(p: &Poly, point: &BTreeMap<String, Q>) -> Result<f64> {
    let mut acc = 0.0;
    for (m, c) in p.terms() {
        let single = Poly::monomial(m.clone(), c.clone());
        acc += eval_poly(&single, point)?.to_f64().abs();
    }
    Ok(acc)
}

impl Expr {
    /// Exact rational when no transcendental atoms remain, float otherwise.
    pub fn eval_at(&self, point: &BTreeMap<String, Q>) -> Result<Value> {
        let n = eval_poly(self.numer(), point)?;
        if self.denom().is_one() {
            return Ok(n);
        }
        let d = eval_poly(self.denom(), point)?;
        n.div(&d)
    }

    pub fn eval_f64(&self, point: &BTreeMap<String, f64>) -> Result<f64> {
        let q: BTreeMap<String, Q> = point
            .iter()
            .map(|(k, v)| Ok((k.clone(), Q::from_float(*v).ok_or_else(|| Error::Domain(format!("{v} is not finite")))?)))
            .collect::<Result<_>>()?;
        Ok(self.eval_at(&q)?.to_f64())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroTest {
    Zero,
    NonZero,
    ProbablyNonZero,
}

impl ZeroTest {
    /// Fold over components: any `NonZero` wins, then any undecided.
    pub fn all<I: IntoIterator<Item = ZeroTest>>(it: I) -> ZeroTest {
        let mut out = ZeroTest::Zero;
        for z in it {
            match z {
                ZeroTest::NonZero => return ZeroTest::NonZero,
                ZeroTest::ProbablyNonZero => out = ZeroTest::ProbablyNonZero,
                ZeroTest::Zero => {}
            }
        }
        out
    }
}

/// Seeded source of random rational probe points in `[-3, 3]` with
/// denominators up to 7.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probe {
    pub seed: u64,
    pub points: usize,
}

impl Default for Probe {
    fn default() -> Self {
        Probe { seed: 0x5eed, points: 8 }
    }
}

const MAX_ATTEMPTS: usize = 64;
const FLOAT_TOL: f64 = 1e-9;

impl Probe {
    pub fn with_seed(seed: u64) -> Self {
        Probe { seed, ..Probe::default() }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn sample_rational(rng: &mut impl Rng) -> Q {
        let d: i64 = rng.random_range(1..=7);
        let n: i64 = rng.random_range(-3 * d..=3 * d);
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn sample_point<'a>(rng: &mut impl Rng, vars: impl IntoIterator<Item = &'a String>) -> BTreeMap<String, Q> {
        vars.into_iter().map(|v| (v.clone(), Probe::sample_rational(rng))).collect()
    }

    /// Exact for rational functions; transcendental residues are probed at
    /// `self.points` random points.
    pub fn is_zero(&self, e: &Expr) -> ZeroTest {
        if e.is_zero() {
            return ZeroTest::Zero;
        }
        if !e.numer().has_fn_atoms() {
            return ZeroTest::NonZero;
        }
        let vars = e.free_vars();
        let mut rng = self.rng();
        let mut hits = 0;
        for _ in 0..MAX_ATTEMPTS {
            let point = Probe::sample_point(&mut rng, &vars);
            let (v, scale) = match (eval_poly(e.numer(), &point), magnitude(e.numer(), &point), e.denom_nonzero_at(&point)) {
                (Ok(v), Ok(s), true) => (v.to_f64(), s),
                _ => continue,
            };
            if !v.is_finite() {
                continue;
            }
            if v.abs() > FLOAT_TOL * scale.max(1.0) {
                return ZeroTest::NonZero;
            }
            hits += 1;
            if hits >= self.points {
                break;
            }
        }
        ZeroTest::ProbablyNonZero
    }
}

impl Expr {
    fn denom_nonzero_at(&self, point: &BTreeMap<String, Q>) -> bool {
        match eval_poly(self.denom(), point) {
            Ok(v) => v.to_f64().abs() > FLOAT_TOL,
            Err(_) => false,
        }
    }
}

/// Zero test with the default probe seed.
pub fn is_zero(e: &Expr) -> ZeroTest {
    Probe::default().is_zero(e)
}
