//! Parametrized immersions `t ↦ x = φ(t)` and the interior differential.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{Coords, Form};
use crate::hodge;
use crate::linalg;
use crate::manifold::Manifold;
use crate::symexpr::{factor, Expr, Probe, ZeroTest};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pseudostructure {
    params: Coords,
    ambient: Coords,
    map: Vec<Expr>,
}

impl Pseudostructure {
    pub fn new(params: Coords, ambient: Coords, map: Vec<Expr>) -> Result<Self> {
        Pseudostructure::new_with(params, ambient, map, &Probe::default())
    }

    /// `map[i]` gives ambient coordinate `i`. Components may use symbolic
    /// constants but not ambient coordinates that are not parameters.
    pub fn new_with(params: Coords, ambient: Coords, map: Vec<Expr>, probe: &Probe) -> Result<Self> {
        if map.len() != ambient.len() {
            return Err(Error::DimensionMismatch { expected: ambient.len(), found: map.len() });
        }
        if params.len() > ambient.len() {
            return Err(Error::Invalid(format!(
                "{} parameters exceed ambient dimension {}",
                params.len(),
                ambient.len()
            )));
        }
        for (i, phi) in map.iter().enumerate() {
            if let Some(v) = phi.free_vars().into_iter().find(|v| ambient.index_of(v).is_some() && params.index_of(v).is_none()) {
                return Err(Error::Invalid(format!(
                    "component {} depends on ambient coordinate `{v}`",
                    ambient.name(i)
                )));
            }
        }
        let ps = Pseudostructure { params, ambient, map };
        let rank = ps.generic_rank(probe);
        if rank < ps.params.len() {
            return Err(Error::Invalid(format!(
                "Jacobian has rank {rank} < {} at every probe point",
                ps.params.len()
            )));
        }
        Ok(ps)
    }

    /// `x_i = x_i` on the whole space.
    pub fn identity(coords: &Coords) -> Self {
        let map = coords.names().iter().map(|n| Expr::var(n)).collect();
        Pseudostructure { params: coords.clone(), ambient: coords.clone(), map }
    }

    pub fn params(&self) -> &Coords {
        &self.params
    }

    pub fn ambient(&self) -> &Coords {
        &self.ambient
    }

    pub fn map(&self) -> &[Expr] {
        &self.map
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    /// `∂φ_i/∂t_j`.
    pub fn jacobian(&self) -> Vec<Vec<Expr>> {
        self.map
            .iter()
            .map(|phi| self.params.names().iter().map(|t| phi.diff(t)).collect())
            .collect()
    }

    fn generic_rank(&self, probe: &Probe) -> usize {
        let k = self.params.len();
        if k == 0 {
            return 0;
        }
        let jac = self.jacobian();
        let vars: BTreeSet<String> = jac.iter().flatten().flat_map(|e| e.free_vars()).collect();
        let mut rng = probe.rng();
        let mut best = 0;
        for _ in 0..4 * probe.points.max(1) {
            let point = Probe::sample_point(&mut rng, &vars);
            let vals: Option<Vec<Vec<f64>>> = jac
                .iter()
                .map(|row| row.iter().map(|e| e.eval_at(&point).ok().map(|v| v.to_f64())).collect())
                .collect();
            if let Some(vals) = vals {
                best = best.max(linalg::numeric_rank(vals, 1e-9));
                if best == k {
                    break;
                }
            }
        }
        best
    }

    fn bindings(&self) -> BTreeMap<String, Expr> {
        self.ambient.names().iter().cloned().zip(self.map.iter().cloned()).collect()
    }
}

/// Substitute `x_i → φ_i` and `dx_i → Σ_j ∂φ_i/∂t_j dt_j`.
pub fn pullback(pi: &Pseudostructure, theta: &Form) -> Result<Form> {
    pi.ambient.check_same(theta.coords())?;
    let p = theta.degree();
    let out = Form::zero(&pi.params, p);
    if p > pi.dim() || theta.is_zero() {
        return Ok(out);
    }
    let dphi: Vec<Form> = pi
        .jacobian()
        .into_iter()
        .map(|row| Form::one_form(&pi.params, row))
        .collect::<Result<_>>()?;
    let bindings = pi.bindings();
    let mut acc = out;
    for (idx, a) in theta.terms() {
        let coeff = a.subst(&bindings)?;
        if coeff.is_zero() {
            continue;
        }
        let mut piece = Form::scalar(&pi.params, coeff);
        for &i in idx.indices() {
            piece = piece.wedge(&dphi[i])?;
        }
        acc = acc.add(&piece)?;
    }
    Ok(acc)
}

pub fn d_pi(pi: &Pseudostructure, theta: &Form) -> Result<Form> {
    Ok(pullback(pi, theta)?.d_flat())
}

pub fn is_closed_on(pi: &Pseudostructure, theta: &Form) -> Result<ZeroTest> {
    is_closed_on_with(pi, theta, &Probe::default())
}

pub fn is_closed_on_with(pi: &Pseudostructure, theta: &Form, probe: &Probe) -> Result<ZeroTest> {
    Ok(d_pi(pi, theta)?.zero_test_with(probe))
}

/// Closure of a form and of its metric dual on a pseudostructure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DualClosure {
    pub form_closed: ZeroTest,
    pub dual_closed: ZeroTest,
}

impl DualClosure {
    pub fn holds(&self) -> bool {
        self.form_closed == ZeroTest::Zero && self.dual_closed == ZeroTest::Zero
    }
}

pub fn defines_pseudostructure(m: &Manifold, pi: &Pseudostructure, theta: &Form, probe: &Probe) -> Result<DualClosure> {
    let dual = hodge::star(m, theta)?;
    Ok(DualClosure {
        form_closed: is_closed_on_with(pi, theta, probe)?,
        dual_closed: is_closed_on_with(pi, &dual, probe)?,
    })
}

pub fn jacobian_matrix(map: &[Expr], inputs: &[String]) -> Vec<Vec<Expr>> {
    map.iter().map(|f| inputs.iter().map(|v| f.diff(v)).collect()).collect()
}

pub fn jacobian_determinant(map: &[Expr], inputs: &[String]) -> Result<Expr> {
    if map.len() != inputs.len() {
        return Err(Error::DimensionMismatch { expected: inputs.len(), found: map.len() });
    }
    linalg::det(&jacobian_matrix(map, inputs))
}

/// `Σ_i (∂f/∂q_i ∂g/∂p_i − ∂f/∂p_i ∂g/∂q_i)`; every name must be a coordinate
/// and appear in at most one pair.
pub fn poisson_bracket(coords: &Coords, f: &Expr, g: &Expr, pairs: &[(String, String)]) -> Result<Expr> {
    let mut seen = BTreeSet::new();
    for name in pairs.iter().flat_map(|(q, p)| [q, p]) {
        if coords.index_of(name).is_none() {
            return Err(Error::UnknownCoordinate(name.clone()));
        }
        if !seen.insert(name) {
            return Err(Error::Invalid(format!("`{name}` appears in more than one canonical pair")));
        }
    }
    Ok(pairs
        .iter()
        .map(|(q, p)| &(&f.diff(q) * &g.diff(p)) - &(&f.diff(p) * &g.diff(q)))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LocusMethod {
    Exact,
    Probe,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocusComponent {
    #[serde(serialize_with = "ser_display")]
    pub factor: Expr,
    pub multiplicity: u32,
    pub method: LocusMethod,
    /// Approximate zeros found by sampling (probe components only).
    pub samples: Vec<BTreeMap<String, f64>>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyReport {
    #[serde(serialize_with = "ser_display")]
    pub expression: Expr,
    #[serde(serialize_with = "ser_display")]
    pub unit: Expr,
    pub components: Vec<LocusComponent>,
    /// Denominator factors; the expression is undefined there.
    #[serde(serialize_with = "ser_display_vec")]
    pub poles: Vec<Expr>,
}

impl DegeneracyReport {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `unit · Π factor^multiplicity` over the numerator.
    pub fn product(&self) -> Expr {
        self.components.iter().fold(self.unit.clone(), |acc, c| {
            &acc * &c.factor.pow(c.multiplicity as i64).expect("non-negative power")
        })
    }
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_display_vec<S: serde::Serializer>(v: &[Expr], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|e| e.to_string()))
}

pub fn degenerate_locus(e: &Expr) -> DegeneracyReport {
    degenerate_locus_with(e, &Probe::default())
}

/// Polynomial factors are exact locus components; factors containing
/// transcendental functions are searched for sign changes along random lines.
pub fn degenerate_locus_with(e: &Expr, probe: &Probe) -> DegeneracyReport {
    let num = factor(e.numer());
    let den = factor(e.denom());
    let mut components = Vec::new();
    let mut rng = probe.rng();
    for (f, m) in &num.factors {
        let fe = Expr::from_poly(f.clone());
        if f.has_fn_atoms() {
            let samples = sample_zeros(&fe, &mut rng);
            let note = samples.is_empty().then(|| "no zero found in probe box".to_string());
            components.push(LocusComponent { factor: fe, multiplicity: *m, method: LocusMethod::Probe, samples, note });
        } else {
            components.push(LocusComponent {
                factor: fe,
                multiplicity: *m,
                method: LocusMethod::Exact,
                samples: Vec::new(),
                note: None,
            });
        }
    }
    let unit = Expr::from_q(num.unit.clone() / den.unit.clone());
    let poles = den.factors.iter().map(|(f, _)| Expr::from_poly(f.clone())).collect();
    DegeneracyReport { expression: e.clone(), unit, components, poles }
}

const LINES: usize = 8;
const STEPS: usize = 64;
const MAX_SAMPLES: usize = 3;

fn sample_zeros(f: &Expr, rng: &mut impl Rng) -> Vec<BTreeMap<String, f64>> {
    let vars: Vec<String> = f.free_vars().into_iter().collect();
    let mut out = Vec::new();
    if vars.is_empty() {
        return out;
    }
    for _ in 0..LINES {
        let origin: Vec<f64> = vars.iter().map(|_| rng.random_range(-3.0..3.0)).collect();
        let dir: Vec<f64> = vars.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let at = |s: f64| -> BTreeMap<String, f64> {
            vars.iter().enumerate().map(|(i, v)| (v.clone(), origin[i] + s * dir[i])).collect()
        };
        let eval = |s: f64| f.eval_f64(&at(s)).ok().filter(|v| v.is_finite());
        let grid: Vec<f64> = (0..=STEPS).map(|i| -3.0 + 6.0 * i as f64 / STEPS as f64).collect();
        for w in grid.windows(2) {
            let (Some(fa), Some(fb)) = (eval(w[0]), eval(w[1])) else { continue };
            if fa == 0.0 {
                out.push(at(w[0]));
            } else if fa.signum() != fb.signum() {
                if let Some(s) = bisect(&eval, w[0], w[1], fa) {
                    out.push(at(s));
                }
            }
            if out.len() >= MAX_SAMPLES {
                return out;
            }
        }
    }
    out
}

fn bisect(eval: &impl Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Option<f64> {
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        let fm = eval(mid)?;
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mid = 0.5 * (a + b);
    // reject poles: a genuine root has a small value
    eval(mid).filter(|v| v.abs() < 1e-6).map(|_| mid)
}
