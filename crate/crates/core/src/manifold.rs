//! Coordinate manifolds with an optional, possibly non-symmetric connection.
//!
//! Index convention: `Connection::get(s, b, a)` is Γ^s_{ba} as it appears in
//! `a_{b;a} = ∂a_b/∂x^a + Γ^s_{ba} a_s`.

use crate::error::{Error, Result};
use crate::forms::{Coords, Form, MultiIndex};
use crate::hodge::Metric;
use crate::symexpr::{Expr, Probe, ZeroTest};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Connection {
    n: usize,
    gamma: Vec<Expr>,
}

impl Connection {
    pub fn zero(n: usize) -> Self {
        Connection { n, gamma: vec![Expr::zero(); n * n * n] }
    }

    /// From a nested table `table[s][b][a]`.
    pub fn new(table: Vec<Vec<Vec<Expr>>>) -> Result<Self> {
        let n = table.len();
        let mut gamma = Vec::with_capacity(n * n * n);
        for plane in table {
            if plane.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: plane.len() });
            }
            for row in plane {
                if row.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: row.len() });
                }
                gamma.extend(row);
            }
        }
        Ok(Connection { n, gamma })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: usize, b: usize, a: usize) -> &Expr {
        &self.gamma[(s * self.n + b) * self.n + a]
    }

    pub fn set(&mut self, s: usize, b: usize, a: usize, value: Expr) {
        let n = self.n;
        self.gamma[(s * n + b) * n + a] = value;
    }

    /// `T(s, a, b) = Γ^s_{ba} − Γ^s_{ab}`.
    pub fn torsion(&self, s: usize, a: usize, b: usize) -> Expr {
        self.get(s, b, a) - self.get(s, a, b)
    }

    /// Symmetric part in the lower slots.
    pub fn symmetrized(&self) -> Connection {
        let mut out = self.clone();
        let half = Expr::rational(1, 2);
        for s in 0..self.n {
            for b in 0..self.n {
                for a in 0..self.n {
                    out.set(s, b, a, &(self.get(s, b, a) + self.get(s, a, b)) * &half);
                }
            }
        }
        out
    }

    pub fn table(&self) -> Vec<Vec<Vec<Expr>>> {
        (0..self.n)
            .map(|s| (0..self.n).map(|b| (0..self.n).map(|a| self.get(s, b, a).clone()).collect()).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifold {
    coords: Coords,
    connection: Option<Connection>,
    metric: Option<Metric>,
}

impl Manifold {
    pub fn new(coords: Coords) -> Self {
        Manifold { coords, connection: None, metric: None }
    }

    pub fn flat(n: usize) -> Self {
        Manifold::new(Coords::standard(n))
    }

    pub fn with_connection(mut self, c: Connection) -> Result<Self> {
        if c.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: c.dim() });
        }
        self.connection = Some(c);
        Ok(self)
    }

    pub fn with_metric(mut self, g: Metric) -> Result<Self> {
        if g.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: g.dim() });
        }
        self.metric = Some(g);
        Ok(self)
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn connection(&self) -> Option<&Connection> {
        self.connection.as_ref()
    }

    pub fn metric(&self) -> Option<&Metric> {
        self.metric.as_ref()
    }

    pub fn require_metric(&self) -> Result<&Metric> {
        self.metric.as_ref().ok_or(Error::MissingMetric)
    }

    fn check_form(&self, theta: &Form) -> Result<()> {
        self.coords.check_same(theta.coords())
    }
}

/// Antisymmetric table `(s, a, b) ↦ Γ^s_{ba} − Γ^s_{ab}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionTable {
    n: usize,
    comps: Vec<Expr>,
}

impl TorsionTable {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: usize, a: usize, b: usize) -> &Expr {
        &self.comps[(s * self.n + a) * self.n + b]
    }

    /// Nonzero entries with `a < b`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, &Expr)> {
        let n = self.n;
        (0..n)
            .flat_map(move |s| (0..n).flat_map(move |a| (a + 1..n).map(move |b| (s, a, b))))
            .map(|(s, a, b)| (s, a, b, self.get(s, a, b)))
            .filter(|(.., e)| !e.is_zero())
    }

    /// `τ^s = Σ_{a<b} T(s,a,b) dx^a ∧ dx^b`.
    pub fn two_form(&self, coords: &Coords, s: usize) -> Form {
        let terms = (0..self.n)
            .flat_map(|a| (a + 1..self.n).map(move |b| (a, b)))
            .map(|(a, b)| (vec![a, b], self.get(s, a, b).clone()));
        Form::from_terms(coords, 2, terms).expect("indices in range")
    }
}

pub fn torsion_commutator(m: &Manifold) -> Result<TorsionTable> {
    let c = m.connection().ok_or(Error::MissingConnection)?;
    let n = m.dim();
    let mut comps = Vec::with_capacity(n * n * n);
    for s in 0..n {
        for a in 0..n {
            for b in 0..n {
                comps.push(c.torsion(s, a, b));
            }
        }
    }
    Ok(TorsionTable { n, comps })
}

/// Commutator of a form split into the part from its coefficients and the
/// part from the torsion of the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorReport {
    pub total: Form,
    pub coefficient_term: Form,
    pub metric_term: Form,
}

impl CommutatorReport {
    pub fn verdict(&self, probe: &Probe) -> ZeroTest {
        self.total.zero_test_with(probe)
    }
}

/// Degree-1 commutator `K_{ab} = (∂_a a_b − ∂_b a_a) + T(s,a,b) a_s`.
pub fn commutator(m: &Manifold, theta: &Form) -> Result<CommutatorReport> {
    if theta.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: theta.degree() });
    }
    commutator_split(m, theta)
}

/// Same split for any degree; the metric term uses the slot-wise torsion rule.
pub fn commutator_split(m: &Manifold, theta: &Form) -> Result<CommutatorReport> {
    m.check_form(theta)?;
    let coefficient_term = theta.d_flat();
    let metric_term = torsion_term(m, theta)?;
    let total = coefficient_term.add(&metric_term)?;
    Ok(CommutatorReport { total, coefficient_term, metric_term })
}

/// `Σ_I a_I Σ_k (−1)^k dx^{i_1} ∧ … ∧ τ^{i_k} ∧ … ∧ dx^{i_p}`.
fn torsion_term(m: &Manifold, theta: &Form) -> Result<Form> {
    let coords = m.coords();
    let p = theta.degree();
    let mut out = Form::zero(coords, p + 1);
    if m.connection().is_none() || p == 0 || p + 1 > m.dim() {
        return Ok(out);
    }
    let table = torsion_commutator(m)?;
    let taus: Vec<Form> = (0..m.dim()).map(|s| table.two_form(coords, s)).collect();
    for (idx, a) in theta.terms() {
        let ix = idx.indices();
        for k in 0..p {
            let tau = &taus[ix[k]];
            if tau.is_zero() {
                continue;
            }
            let prefix = Form::basis(coords, &ix[..k])?;
            let suffix = Form::basis(coords, &ix[k + 1..])?;
            let piece = prefix.wedge(tau)?.wedge(&suffix)?.scale(a);
            out = if k % 2 == 0 { out.add(&piece)? } else { out.sub(&piece)? };
        }
    }
    Ok(out)
}

pub fn d_evolutionary(m: &Manifold, theta: &Form) -> Result<Form> {
    Ok(commutator_split(m, theta)?.total)
}

pub fn is_deforming(m: &Manifold) -> bool {
    is_deforming_with(m, &Probe::default())
}

pub fn is_deforming_with(m: &Manifold, probe: &Probe) -> bool {
    match torsion_commutator(m) {
        Ok(t) => t.nonzero().any(|(.., e)| probe.is_zero(e) != ZeroTest::Zero),
        Err(_) => false,
    }
}

/// Component `K_{ab}` of a 2-form for `a < b`.
pub fn two_form_component(f: &Form, a: usize, b: usize) -> Expr {
    f.coeff(&MultiIndex::new(vec![a, b]).expect("a < b"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_form;

    fn e(s: &str) -> Expr {
        s.parse().unwrap()
    }

    /// n = 2 with Γ^1_{21} = c (zero-based: get(0, 1, 0)).
    fn twisted(c: &str) -> Manifold {
        let mut conn = Connection::zero(2);
        conn.set(0, 1, 0, e(c));
        Manifold::flat(2).with_connection(conn).unwrap()
    }

    #[test]
    fn torsion_components() {
        let m = twisted("c");
        let t = torsion_commutator(&m).unwrap();
        assert_eq!(t.get(0, 0, 1), &e("c"));
        assert_eq!(t.get(0, 1, 0), &e("-c"));
        assert_eq!(torsion_commutator(&Manifold::flat(2)), Err(Error::MissingConnection));
        let zero = Manifold::flat(3).with_connection(Connection::zero(3)).unwrap();
        assert_eq!(torsion_commutator(&zero).unwrap().nonzero().count(), 0);
    }

    #[test]
    fn flat_commutator_of_rotation_field() {
        let m = Manifold::flat(2);
        let theta = parse_form("(-x2) dx1 + (x1) dx2", m.coords()).unwrap();
        let r = commutator(&m, &theta).unwrap();
        assert_eq!(r.coefficient_term.to_string(), "(2) dx1^dx2");
        assert!(r.metric_term.is_zero());
    }

    #[test]
    fn metric_term_only() {
        let m = twisted("c");
        let theta = parse_form("(a1) dx1", m.coords()).unwrap();
        let r = commutator(&m, &theta).unwrap();
        assert!(r.coefficient_term.is_zero());
        assert_eq!(two_form_component(&r.metric_term, 0, 1), e("a1*c"));
        assert_eq!(d_evolutionary(&m, &theta).unwrap(), r.total);
        assert!(is_deforming(&m));
        assert!(!is_deforming(&Manifold::flat(2)));
    }

    #[test]
    fn exact_forms_have_zero_flat_commutator() {
        let m = Manifold::flat(3);
        let f = Form::scalar(m.coords(), e("x1*x2^2 + sin(x3)"));
        assert!(commutator(&m, &f.d_flat()).unwrap().total.is_zero());
    }

    #[test]
    fn symmetric_connection_is_not_deforming() {
        let mut conn = Connection::zero(2);
        conn.set(0, 0, 1, e("x1"));
        conn.set(0, 1, 0, e("x1"));
        conn.set(1, 1, 1, e("x2^2"));
        let m = Manifold::flat(2).with_connection(conn).unwrap();
        assert!(!is_deforming(&m));
        let theta = parse_form("(x1*x2) dx1 + (x2) dx2", m.coords()).unwrap();
        assert_eq!(d_evolutionary(&m, &theta).unwrap(), theta.d_flat());
    }

    #[test]
    fn evolutionary_differential_is_not_nilpotent_with_torsion() {
        let m = twisted("c");
        let f = Form::scalar(m.coords(), e("x1"));
        let once = d_evolutionary(&m, &f).unwrap();
        let twice = d_evolutionary(&m, &once).unwrap();
        assert_eq!(twice.to_string(), "(c) dx1^dx2");
    }

    #[test]
    fn degree_checks() {
        let m = Manifold::flat(2);
        let f = Form::scalar(m.coords(), e("x1"));
        assert!(matches!(commutator(&m, &f), Err(Error::DegreeMismatch { .. })));
        let other = Form::scalar(&Coords::standard(3), e("x1")).d_flat();
        assert!(matches!(commutator(&m, &other), Err(Error::DimensionMismatch { .. })));
    }
}
