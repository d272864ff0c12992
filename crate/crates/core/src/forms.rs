//! Skew-symmetric forms on a flat coordinate space.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symexpr::{Expr, Probe, ZeroTest};

/// Ordered, unique coordinate names of an `n`-dimensional chart.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coords(Arc<[String]>);

impl Coords {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            let valid = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::Invalid(format!("`{n}` is not a valid coordinate name")));
            }
            if names[..i].contains(n) {
                return Err(Error::Invalid(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Coords(names.into()))
    }

    /// `x1, …, xn`.
    pub fn standard(n: usize) -> Self {
        Coords((1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub(crate) fn check_same(&self, other: &Coords) -> Result<()> {
        if self == other {
            return Ok(());
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        Err(Error::CoordinateMismatch(self.0.join(","), other.0.join(",")))
    }
}

/// Strictly increasing list of coordinate indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(format!("multi-index {indices:?} is not strictly increasing")));
        }
        Ok(MultiIndex(indices))
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    /// Sort arbitrary indices, returning the permutation sign, or `None`
    /// when an index repeats.
    pub fn sorted(mut indices: Vec<usize>) -> Option<(i64, MultiIndex)> {
        let mut sign = 1;
        // insertion sort; inputs are tiny
        for i in 1..indices.len() {
            let mut j = i;
            while j > 0 && indices[j - 1] > indices[j] {
                indices.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((sign, MultiIndex(indices)))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Indices of `0..n` not in `self`.
    pub fn complement(&self, n: usize) -> MultiIndex {
        MultiIndex((0..n).filter(|i| !self.contains(*i)).collect())
    }

    /// All strictly increasing multi-indices of length `p` over `0..n`.
    pub fn all(n: usize, p: usize) -> Vec<MultiIndex> {
        fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if cur.len() == p {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if p <= n {
            rec(0, n, p, &mut Vec::new(), &mut out);
        }
        out
    }
}

/// Degree-`p` form: sparse map from basis multi-indices to nonzero
/// coefficients. A form of degree greater than the dimension is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    coords: Coords,
    degree: usize,
    terms: BTreeMap<MultiIndex, Expr>,
}

impl Form {
    pub fn zero(coords: &Coords, degree: usize) -> Self {
        Form { coords: coords.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn scalar(coords: &Coords, f: Expr) -> Self {
        let mut out = Form::zero(coords, 0);
        if !f.is_zero() {
            out.terms.insert(MultiIndex::empty(), f);
        }
        out
    }

    /// `dx^{i_1} ∧ … ∧ dx^{i_p}` for arbitrary (unsorted) indices.
    pub fn basis(coords: &Coords, indices: &[usize]) -> Result<Self> {
        Form::from_terms(coords, indices.len(), [(indices.to_vec(), Expr::one())])
    }

    /// `Σ a_i dx^i`.
    pub fn one_form(coords: &Coords, coeffs: Vec<Expr>) -> Result<Self> {
        if coeffs.len() != coords.len() {
            return Err(Error::DimensionMismatch { expected: coords.len(), found: coeffs.len() });
        }
        Form::from_terms(coords, 1, coeffs.into_iter().enumerate().map(|(i, a)| (vec![i], a)))
    }

    /// Build from possibly unsorted, possibly repeated index lists; terms are
    /// sign-corrected and merged.
    pub fn from_terms(
        coords: &Coords,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Expr)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: idx.len() });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= coords.len()) {
                return Err(Error::DimensionMismatch { expected: coords.len(), found: bad + 1 });
            }
            if let Some((sign, mi)) = MultiIndex::sorted(idx) {
                let v = if sign < 0 { -c } else { c };
                accumulate(&mut acc, mi, v);
            }
        }
        Ok(Form { coords: coords.clone(), degree, terms: prune(acc) })
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
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

    pub fn coeff(&self, idx: &MultiIndex) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_else(Expr::zero)
    }

    /// Coefficient of `dx^{i_1} ∧ …` for unsorted indices, sign-corrected.
    pub fn component(&self, indices: &[usize]) -> Expr {
        match MultiIndex::sorted(indices.to_vec()) {
            Some((s, mi)) if s < 0 => -self.coeff(&mi),
            Some((_, mi)) => self.coeff(&mi),
            None => Expr::zero(),
        }
    }

    /// The scalar of a degree-0 form.
    pub fn as_scalar(&self) -> Option<Expr> {
        (self.degree == 0).then(|| self.coeff(&MultiIndex::empty()))
    }

    fn check_compatible(&self, other: &Form) -> Result<()> {
        self.coords.check_same(&other.coords)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check_compatible(other)?;
        let mut acc = self.terms.clone();
        for (k, v) in &other.terms {
            accumulate(&mut acc, k.clone(), v.clone());
        }
        Ok(Form { coords: self.coords.clone(), degree: self.degree, terms: prune(acc) })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.map(|c| -c)
    }

    pub fn scale(&self, c: &Expr) -> Form {
        if c.is_zero() {
            return Form::zero(&self.coords, self.degree);
        }
        self.map(|v| v * c)
    }

    /// Apply `f` to every coefficient, dropping those that become zero.
    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Form {
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.clone(), f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Form { coords: self.coords.clone(), degree: self.degree, terms }
    }

    pub fn try_map(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<Form> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let w = f(v)?;
            if !w.is_zero() {
                terms.insert(k.clone(), w);
            }
        }
        Ok(Form { coords: self.coords.clone(), degree: self.degree, terms })
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.coords.check_same(&other.coords)?;
        let degree = self.degree + other.degree;
        let mut acc = BTreeMap::new();
        if degree <= self.dim() {
            for (i, a) in &self.terms {
                for (j, b) in &other.terms {
                    let joined: Vec<usize> = i.0.iter().chain(&j.0).copied().collect();
                    if let Some((sign, k)) = MultiIndex::sorted(joined) {
                        let prod = a * b;
                        accumulate(&mut acc, k, if sign < 0 { -prod } else { prod });
                    }
                }
            }
        }
        Ok(Form { coords: self.coords.clone(), degree, terms: prune(acc) })
    }

    /// `Σ da_I ∧ dx^I` with `da = Σ_j ∂a/∂x_j dx_j`.
    pub fn d_flat(&self) -> Form {
        let mut acc = BTreeMap::new();
        for (idx, a) in &self.terms {
            for (j, name) in self.coords.names().iter().enumerate() {
                if idx.contains(j) {
                    continue;
                }
                let da = a.diff(name);
                if da.is_zero() {
                    continue;
                }
                let pos = idx.0.iter().take_while(|&&i| i < j).count();
                let mut k = idx.0.clone();
                k.insert(pos, j);
                accumulate(&mut acc, MultiIndex(k), if pos % 2 == 1 { -da } else { da });
            }
        }
        Form { coords: self.coords.clone(), degree: self.degree + 1, terms: prune(acc) }
    }

    /// Zero test over every coefficient.
    pub fn zero_test_with(&self, probe: &Probe) -> ZeroTest {
        ZeroTest::all(self.terms.values().map(|c| probe.is_zero(c)))
    }

    pub fn is_closed_flat(&self) -> ZeroTest {
        self.is_closed_flat_with(&Probe::default())
    }

    pub fn is_closed_flat_with(&self, probe: &Probe) -> ZeroTest {
        self.d_flat().zero_test_with(probe)
    }

    /// Substitute into every coefficient.
    pub fn subst(&self, bindings: &BTreeMap<String, Expr>) -> Result<Form> {
        self.try_map(|c| c.subst(bindings))
    }

    /// Same coefficients, reinterpreted over another chart of equal dimension.
    pub fn with_coords(&self, coords: &Coords) -> Result<Form> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coords.len() });
        }
        Ok(Form { coords: coords.clone(), degree: self.degree, terms: self.terms.clone() })
    }

    /// Render a basis element as `dx1^dx2`.
    pub fn basis_text(&self, idx: &[usize]) -> String {
        idx.iter()
            .map(|&i| format!("d{}", self.coords.name(i % self.dim().max(1))))
            .collect::<Vec<_>>()
            .join("^")
    }
}

fn accumulate(acc: &mut BTreeMap<MultiIndex, Expr>, k: MultiIndex, v: Expr) {
    if v.is_zero() {
        return;
    }
    match acc.get_mut(&k) {
        Some(e) => *e = &*e + &v,
        None => {
            acc.insert(k, v);
        }
    }
}

fn prune(mut acc: BTreeMap<MultiIndex, Expr>) -> BTreeMap<MultiIndex, Expr> {
    acc.retain(|_, v| !v.is_zero());
    acc
}

/// `(c) dx1^dx2 + (c) dx1^dx3`; a zero `p`-form prints as `(0)` followed by
/// `p` basis factors so that its degree survives a round trip.
impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            if self.degree == 0 || self.dim() == 0 {
                return f.write_str("(0)");
            }
            let idx: Vec<usize> = (0..self.degree).collect();
            return write!(f, "(0) {}", self.basis_text(&idx));
        }
        let mut first = true;
        for (idx, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if !idx.is_empty() {
                write!(f, " {}", self.basis_text(&idx.0))?;
            }
        }
        Ok(())
    }
}
