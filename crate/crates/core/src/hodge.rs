//! Metric duality on forms.
//!
//! Sign convention: on `p`-forms `δ = s·(−1)^{n(p+1)+1} ⋆d⋆` with `s` the
//! sign of `det g`. With this choice `δ` is the formal adjoint of `d`, so the
//! standard Laplacian `dδ + δd` is non-negative and equals `−Σ ∂²f/∂x_i²` on
//! functions in Euclidean signature.

// index loops read more clearly for matrix algebra
#![allow(clippy::needless_range_loop)]

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{Form, MultiIndex};
use crate::linalg::{self, Matrix};
use crate::manifold::Manifold;
use crate::symexpr::{Expr, Probe, ZeroTest};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Euclidean,
    Lorentzian,
}

impl Signature {
    /// Sign of the metric determinant.
    pub fn sign(self) -> i64 {
        match self {
            Signature::Euclidean => 1,
            Signature::Lorentzian => -1,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signature::Euclidean => "euclidean",
            Signature::Lorentzian => "lorentzian",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    g: Matrix,
    inv: Matrix,
    det: Expr,
    volume: Option<Expr>,
    signature: Signature,
}

impl Metric {
    pub fn euclidean(n: usize) -> Self {
        let g: Matrix = (0..n).map(|i| (0..n).map(|j| Expr::int((i == j) as i64)).collect()).collect();
        Metric { inv: g.clone(), g, det: Expr::one(), volume: Some(Expr::one()), signature: Signature::Euclidean }
    }

    /// `diag(-1, 1, …, 1)`.
    pub fn minkowski(n: usize) -> Self {
        let g: Matrix = (0..n)
            .map(|i| (0..n).map(|j| Expr::int(if i != j { 0 } else if i == 0 { -1 } else { 1 })).collect())
            .collect();
        Metric::new(g).expect("Minkowski metric is valid")
    }

    pub fn new(g: Matrix) -> Result<Self> {
        Metric::new_with(g, &Probe::default())
    }

    /// Validates symmetry and non-degeneracy and infers the signature.
    /// Diagonal constant metrics may have one negative entry; anything else
    /// must be positive definite at the probe points.
    pub fn new_with(g: Matrix, probe: &Probe) -> Result<Self> {
        let n = linalg::check_square(&g)?;
        for i in 0..n {
            for j in i + 1..n {
                if probe.is_zero(&(&g[i][j] - &g[j][i])) != ZeroTest::Zero {
                    return Err(Error::Invalid(format!("metric is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let det = linalg::det(&g)?;
        if probe.is_zero(&det) == ZeroTest::Zero {
            return Err(Error::DegenerateMetric("determinant is identically zero".into()));
        }
        let signature = infer_signature(&g, probe)?;
        let (inv, _) = linalg::inverse(&g)?;
        let volume = det.scale_q(&crate::symexpr::poly::int(signature.sign())).sqrt_exact();
        Ok(Metric { g, inv, det, volume, signature })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn components(&self) -> &Matrix {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inv
    }

    pub fn det(&self) -> &Expr {
        &self.det
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    /// `sqrt|det g|` when it is an exact expression.
    pub fn volume_factor(&self) -> Result<&Expr> {
        self.volume.as_ref().ok_or_else(|| {
            Error::Unsupported(format!("sqrt|det g| is not exact for det g = {}", self.det))
        })
    }
}

fn infer_signature(g: &Matrix, probe: &Probe) -> Result<Signature> {
    let n = g.len();
    let diagonal_const = (0..n).all(|i| (0..n).all(|j| if i == j { g[i][j].is_constant() } else { g[i][j].is_zero() }));
    if diagonal_const {
        let negatives = (0..n).filter(|&i| g[i][i].as_rational().is_some_and(|q| q < num_traits::Zero::zero())).count();
        return match negatives {
            0 => Ok(Signature::Euclidean),
            1 => Ok(Signature::Lorentzian),
            k => Err(Error::Unsupported(format!("diagonal metric with {k} negative entries"))),
        };
    }
    let vars: std::collections::BTreeSet<String> = g.iter().flatten().flat_map(|e| e.free_vars()).collect();
    let mut rng = probe.rng();
    let mut checked = 0;
    for _ in 0..4 * probe.points.max(1) {
        let point = Probe::sample_point(&mut rng, &vars);
        let vals: Option<Vec<Vec<f64>>> = g
            .iter()
            .map(|row| row.iter().map(|e| e.eval_at(&point).ok().map(|v| v.to_f64())).collect())
            .collect();
        let Some(vals) = vals else { continue };
        if !leading_minors_positive(&vals) {
            return Err(Error::Unsupported(
                "non-diagonal or non-constant metrics must be positive definite".into(),
            ));
        }
        checked += 1;
        if checked >= probe.points {
            break;
        }
    }
    Ok(Signature::Euclidean)
}

fn leading_minors_positive(m: &[Vec<f64>]) -> bool {
    // Cholesky succeeds iff positive definite
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = m[i][i] - s;
                if d.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                    return false;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (m[i][j] - s) / l[j][j];
            }
        }
    }
    true
}

fn metric_of(m: &Manifold) -> Result<&Metric> {
    m.require_metric()
}

/// Hodge dual: `⋆α = sqrt|g| Σ_J (Σ_I det(g^{-1}[J, I]) α_I) sign(J, Jᶜ) dx^{Jᶜ}`.
pub fn star(m: &Manifold, theta: &Form) -> Result<Form> {
    m.coords().check_same(theta.coords())?;
    let g = metric_of(m)?;
    let n = m.dim();
    let p = theta.degree();
    if p > n {
        return Err(Error::DegreeMismatch { expected: n, found: p });
    }
    let vol = g.volume_factor()?;
    let mut terms = Vec::new();
    for j in MultiIndex::all(n, p) {
        let raised: Expr = theta
            .terms()
            .map(|(i, a)| &linalg::det_sub(&g.inv, j.indices(), i.indices()) * a)
            .sum();
        if raised.is_zero() {
            continue;
        }
        let jc = j.complement(n);
        let full: Vec<usize> = j.indices().iter().chain(jc.indices()).copied().collect();
        let (sign, _) = MultiIndex::sorted(full).expect("J and its complement are disjoint");
        let c = &raised * vol;
        terms.push((jc.indices().to_vec(), if sign < 0 { -c } else { c }));
    }
    Form::from_terms(m.coords(), n - p, terms)
}

/// Codifferential. A 0-form maps to the zero 0-form.
pub fn delta(m: &Manifold, theta: &Form) -> Result<Form> {
    m.coords().check_same(theta.coords())?;
    let g = metric_of(m)?;
    let n = m.dim();
    let p = theta.degree();
    if p > n {
        return Err(Error::DegreeMismatch { expected: n, found: p });
    }
    if p == 0 {
        return Ok(Form::zero(m.coords(), 0));
    }
    let inner = star(m, &star(m, theta)?.d_flat())?;
    let exponent = n * (p + 1) + 1;
    let sign = g.signature.sign() * if exponent.is_multiple_of(2) { 1 } else { -1 };
    Ok(if sign < 0 { inner.neg() } else { inner })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianVariant {
    /// `dδ + δd`
    #[default]
    Standard,
    /// `dδ − δd`
    Paper,
}

pub fn laplacian(m: &Manifold, theta: &Form, variant: LaplacianVariant) -> Result<Form> {
    let p = theta.degree();
    let n = m.dim();
    let dd = if p < n { delta(m, &theta.d_flat())? } else { Form::zero(m.coords(), p) };
    let dd_ = if p == 0 { Form::zero(m.coords(), 0) } else { delta(m, theta)?.d_flat() };
    match variant {
        LaplacianVariant::Standard => dd_.add(&dd),
        LaplacianVariant::Paper => dd_.sub(&dd),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Coords;
    use crate::syntax::parse_form;

    fn euclid(n: usize) -> Manifold {
        Manifold::flat(n).with_metric(Metric::euclidean(n)).unwrap()
    }

    fn f(m: &Manifold, s: &str) -> Form {
        parse_form(s, m.coords()).unwrap()
    }

    #[test]
    fn star_on_the_plane() {
        let m = euclid(2);
        assert_eq!(star(&m, &f(&m, "dx1")).unwrap(), f(&m, "dx2"));
        assert_eq!(star(&m, &f(&m, "dx2")).unwrap(), f(&m, "-dx1"));
        assert_eq!(star(&m, &f(&m, "(1)")).unwrap(), f(&m, "dx1^dx2"));
        let m3 = euclid(3);
        assert_eq!(star(&m3, &f(&m3, "(1)")).unwrap(), f(&m3, "dx1^dx2^dx3"));
    }

    #[test]
    fn double_star_sign() {
        for n in 0..=4 {
            let m = euclid(n);
            for p in 0..=n {
                for idx in MultiIndex::all(n, p) {
                    let b = Form::basis(m.coords(), idx.indices()).unwrap().scale(&"x1 + 2".parse().unwrap());
                    let ss = star(&m, &star(&m, &b).unwrap()).unwrap();
                    let expect = if (p * (n - p)) % 2 == 0 { b.clone() } else { b.neg() };
                    assert_eq!(ss, expect, "n={n} p={p}");
                }
            }
        }
    }

    #[test]
    fn codifferential_fixtures() {
        let m = euclid(2);
        assert_eq!(delta(&m, &f(&m, "(x1) dx1")).unwrap(), f(&m, "(-1)"));
        assert!(delta(&m, &f(&m, "(5) dx1")).unwrap().is_zero());
        let w = f(&m, "(x1^2*x2) dx1^dx2");
        assert!(delta(&m, &delta(&m, &w).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn laplacian_of_quadratic() {
        let m = euclid(2);
        let q = f(&m, "(x1^2 + x2^2)");
        assert_eq!(laplacian(&m, &q, LaplacianVariant::Standard).unwrap(), f(&m, "(-4)"));
        assert_eq!(laplacian(&m, &q, LaplacianVariant::Paper).unwrap(), f(&m, "(4)"));
        assert!(laplacian(&m, &f(&m, "(7)"), LaplacianVariant::Standard).unwrap().is_zero());
    }

    #[test]
    fn laplacian_on_one_forms_is_componentwise() {
        let m = euclid(2);
        let w = f(&m, "(x1^3) dx1 + (x1*x2^2) dx2");
        let l = laplacian(&m, &w, LaplacianVariant::Standard).unwrap();
        assert_eq!(l, f(&m, "(-6*x1) dx1 + (-2*x1) dx2"));
    }

    #[test]
    fn lorentzian_star() {
        let m = Manifold::flat(2).with_metric(Metric::minkowski(2)).unwrap();
        assert_eq!(m.metric().unwrap().signature(), Signature::Lorentzian);
        // ⋆⋆ = -(−1)^{p(n−p)} in Lorentzian signature
        let b = f(&m, "dx1");
        assert_eq!(star(&m, &star(&m, &b).unwrap()).unwrap(), b);
    }

    #[test]
    fn metric_validation() {
        let g = |rows: &[&[&str]]| -> Matrix { rows.iter().map(|r| r.iter().map(|s| s.parse().unwrap()).collect()).collect() };
        assert!(matches!(Metric::new(g(&[&["1", "1"], &["1", "1"]])), Err(Error::DegenerateMetric(_))));
        assert!(matches!(Metric::new(g(&[&["1", "2"], &["0", "1"]])), Err(Error::Invalid(_))));
        assert!(matches!(Metric::new(g(&[&["-1", "0"], &["0", "-1"]])), Err(Error::Unsupported(_))));
        assert!(matches!(Metric::new(g(&[&["1", "2"], &["2", "1"]])), Err(Error::Unsupported(_))));
        let conformal = Metric::new(g(&[&["x1^2", "0"], &["0", "x1^2"]])).unwrap();
        assert_eq!(conformal.volume_factor().unwrap(), &"x1^2".parse::<Expr>().unwrap());
        let m = Manifold::new(Coords::standard(2)).with_metric(conformal).unwrap();
        assert_eq!(star(&m, &f(&m, "dx1")).unwrap(), f(&m, "dx2"));
        let odd = Metric::new(g(&[&["x1^2 + 1", "0"], &["0", "1"]])).unwrap();
        assert!(matches!(odd.volume_factor(), Err(Error::Unsupported(_))));
        assert!(matches!(delta(&Manifold::flat(2), &f(&euclid(2), "dx1")), Err(Error::MissingMetric)));
    }
}
