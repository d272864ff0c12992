//! Relations `dψ = ω` built from balance data, their commutators, and the
//! passage to identical relations on pseudostructures.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{Coords, Form};
use crate::manifold::{self, CommutatorReport, Manifold};
use crate::pseudostructure::{self, Pseudostructure};
use crate::symexpr::{Atom, Expr, Probe, ZeroTest, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceSystem {
    pub coords: Coords,
    pub a: Vec<Expr>,
    pub psi: String,
    pub manifold: Option<Manifold>,
}

impl BalanceSystem {
    pub fn new(coords: Coords, a: Vec<Expr>, psi: impl Into<String>) -> Self {
        BalanceSystem { coords, a, psi: psi.into(), manifold: None }
    }

    pub fn with_manifold(mut self, m: Manifold) -> Self {
        self.manifold = Some(m);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionaryRelation {
    pub psi: String,
    pub omega: Form,
    pub commutator: CommutatorReport,
    pub manifold: Option<Manifold>,
}

impl EvolutionaryRelation {
    /// A relation with a directly supplied right-hand side of any degree.
    pub fn from_form(psi: impl Into<String>, omega: Form, manifold: Option<Manifold>) -> Result<Self> {
        let m = manifold.clone().unwrap_or_else(|| Manifold::new(omega.coords().clone()));
        let commutator = manifold::commutator_split(&m, &omega)?;
        Ok(EvolutionaryRelation { psi: psi.into(), omega, commutator, manifold })
    }

    pub fn degree(&self) -> usize {
        self.omega.degree()
    }
}

pub fn build_relation(b: &BalanceSystem) -> Result<EvolutionaryRelation> {
    if b.a.len() != b.coords.len() {
        return Err(Error::DimensionMismatch { expected: b.coords.len(), found: b.a.len() });
    }
    if let Some(m) = &b.manifold {
        b.coords.check_same(m.coords())?;
    }
    let omega = Form::one_form(&b.coords, b.a.clone())?;
    EvolutionaryRelation::from_form(b.psi.clone(), omega, b.manifold.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Identical,
    Nonidentical,
    Undetermined,
}

pub fn nonidentity_check(r: &EvolutionaryRelation) -> Verdict {
    nonidentity_check_with(r, &Probe::default())
}

pub fn nonidentity_check_with(r: &EvolutionaryRelation, probe: &Probe) -> Verdict {
    match r.commutator.verdict(probe) {
        ZeroTest::Zero => Verdict::Identical,
        ZeroTest::NonZero => Verdict::Nonidentical,
        ZeroTest::ProbablyNonZero => Verdict::Undetermined,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// From the coefficients: the discrete-change term.
    pub quantum_term: Form,
    /// From the torsion of the manifold.
    pub deformation_term: Form,
}

pub fn commutator_decomposition(r: &EvolutionaryRelation) -> Decomposition {
    Decomposition {
        quantum_term: r.commutator.coefficient_term.clone(),
        deformation_term: r.commutator.metric_term.clone(),
    }
}

/// `dψ = ω_π = d θ` on a pseudostructure. Degree-0 relations are terminal
/// and carry no antiderivative.
#[derive(Clone, Debug, PartialEq)]
pub struct IdenticalRelation {
    pub pseudostructure: Pseudostructure,
    pub psi: String,
    pub restricted: Form,
    pub antiderivative: Option<Form>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureFailure {
    pub restricted: Form,
    /// `d_π ω`, whose nonzero coefficients block the transformation.
    pub residual: Form,
    pub verdict: ZeroTest,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransformOutcome {
    Identical(IdenticalRelation),
    NotClosed(ClosureFailure),
}

pub fn attempt_degenerate_transformation(
    r: &EvolutionaryRelation,
    pi: &Pseudostructure,
    probe: &Probe,
) -> Result<TransformOutcome> {
    restrict(&r.psi, &r.omega, pi, probe)
}

fn restrict(psi: &str, omega: &Form, pi: &Pseudostructure, probe: &Probe) -> Result<TransformOutcome> {
    let restricted = pseudostructure::pullback(pi, omega)?;
    if restricted.degree() == 0 {
        return Ok(TransformOutcome::Identical(IdenticalRelation {
            pseudostructure: pi.clone(),
            psi: psi.to_string(),
            restricted,
            antiderivative: None,
        }));
    }
    let residual = restricted.d_flat();
    let verdict = residual.zero_test_with(probe);
    if verdict != ZeroTest::Zero {
        return Ok(TransformOutcome::NotClosed(ClosureFailure { restricted, residual, verdict }));
    }
    let theta = poincare_antiderivative_with(&restricted, probe)?;
    Ok(TransformOutcome::Identical(IdenticalRelation {
        pseudostructure: pi.clone(),
        psi: psi.to_string(),
        restricted,
        antiderivative: Some(theta),
    }))
}

pub fn poincare_antiderivative(omega: &Form) -> Result<Form> {
    poincare_antiderivative_with(omega, &Probe::default())
}

/// Homotopy operator centred at the origin:
/// `H(ω) = Σ_I Σ_k (−1)^k (∫₀¹ s^{p−1} ω_I(s x) ds) x^{i_k} dx^{I∖i_k}`.
pub fn poincare_antiderivative_with(omega: &Form, probe: &Probe) -> Result<Form> {
    let p = omega.degree();
    if p == 0 {
        return Err(Error::DegreeMismatch { expected: 1, found: 0 });
    }
    let residual = omega.d_flat();
    match residual.zero_test_with(probe) {
        ZeroTest::Zero => {}
        ZeroTest::NonZero => {
            return Err(Error::NotClosed(
                residual.terms().map(|(i, c)| format!("({c}) {}", omega.basis_text(i.indices()))).collect(),
            ))
        }
        ZeroTest::ProbablyNonZero => {
            return Err(Error::Unsupported("closure could not be decided exactly".into()))
        }
    }
    let coords = omega.coords();
    let s = fresh_name(omega);
    let scaled: BTreeMap<String, Expr> = coords
        .names()
        .iter()
        .map(|x| (x.clone(), &Expr::var(&s) * &Expr::var(x)))
        .collect();
    let mut terms = Vec::new();
    for (idx, a) in omega.terms() {
        let integral = integrate_unit(&a.subst(&scaled)?, &s, p - 1)?;
        let ix = idx.indices();
        for k in 0..p {
            let rest: Vec<usize> = ix.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &i)| i).collect();
            let c = &integral * &Expr::var(coords.name(ix[k]));
            terms.push((rest, if k % 2 == 1 { -c } else { c }));
        }
    }
    Form::from_terms(coords, p - 1, terms)
}

fn fresh_name(omega: &Form) -> String {
    let used: std::collections::BTreeSet<String> = omega
        .terms()
        .flat_map(|(_, c)| c.free_vars())
        .chain(omega.coords().names().iter().cloned())
        .collect();
    let mut s = "s".to_string();
    while used.contains(&s) {
        s.push('_');
    }
    s
}

/// `∫₀¹ s^shift e(s) ds` for `e` polynomial in `s`.
fn integrate_unit(e: &Expr, s: &str, shift: usize) -> Result<Expr> {
    let unsupported = || Error::Unsupported(format!("cannot integrate `{e}` exactly in the scaling parameter"));
    if Expr::from_poly(e.denom().clone()).depends_on(s) {
        return Err(unsupported());
    }
    let coeffs = e.numer().coeffs_in(&Atom::Var(s.to_string()));
    let mut acc = Expr::zero();
    for (j, c) in coeffs.iter().enumerate() {
        let c = Expr::from_poly(c.clone());
        if c.depends_on(s) {
            return Err(unsupported());
        }
        let w = Q::new(1.into(), ((j + shift + 1) as i64).into());
        acc = &acc + &c.scale_q(&w);
    }
    acc.checked_div(&Expr::from_poly(e.denom().clone()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub k: usize,
    pub relation: IdenticalRelation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageFailure {
    pub k: usize,
    pub failure: ClosureFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationChain {
    pub stages: Vec<Stage>,
    pub failure: Option<StageFailure>,
}

/// Restrict, integrate, and repeat on the antiderivative until degree 0.
/// Stage `j` uses `pis[j]`; once the list runs out the identity on the
/// current parameter space is used.
pub fn sequential_integration(
    r: &EvolutionaryRelation,
    pis: &[Pseudostructure],
    probe: &Probe,
) -> Result<IntegrationChain> {
    let mut stages = Vec::new();
    let mut current = r.omega.clone();
    for j in 0.. {
        let pi = match pis.get(j) {
            Some(pi) => pi.clone(),
            None => Pseudostructure::identity(current.coords()),
        };
        let k = current.degree();
        match restrict(&r.psi, &current, &pi, probe)? {
            TransformOutcome::NotClosed(failure) => {
                return Ok(IntegrationChain { stages, failure: Some(StageFailure { k, failure }) })
            }
            TransformOutcome::Identical(rel) => {
                let next = rel.antiderivative.clone();
                stages.push(Stage { k, relation: rel });
                match next {
                    Some(theta) => current = theta,
                    None => break,
                }
            }
        }
    }
    Ok(IntegrationChain { stages, failure: None })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfvariationStep {
    pub step: usize,
    pub a: Vec<Expr>,
    pub verdict: Verdict,
}

/// Alternate between checking the relation and letting `perturb` update the
/// coefficients. Stops once the relation is identical or after `max_steps`
/// checks.
pub fn selfvariation(
    b: &BalanceSystem,
    max_steps: usize,
    probe: &Probe,
    mut perturb: impl FnMut(usize, &[Expr]) -> Vec<Expr>,
) -> Result<Vec<SelfvariationStep>> {
    let mut sys = b.clone();
    let mut trace = Vec::new();
    for step in 0..max_steps {
        let verdict = nonidentity_check_with(&build_relation(&sys)?, probe);
        trace.push(SelfvariationStep { step, a: sys.a.clone(), verdict });
        if verdict == Verdict::Identical {
            break;
        }
        sys.a = perturb(step, &sys.a);
    }
    Ok(trace)
}
