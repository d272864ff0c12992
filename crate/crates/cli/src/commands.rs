use std::path::Path;

use formcalc_core::classify::classify_with;
use formcalc_core::config;
use formcalc_core::evolution::{self, TransformOutcome};
use formcalc_core::hodge;
use formcalc_core::manifold::{self, CommutatorReport};
use formcalc_core::pseudostructure::{self, Pseudostructure};
use formcalc_core::{
    parse_expr, parse_form, BalanceSystem, Coords, Error, Expr, Form, LaplacianVariant, Manifold, Metric, Probe,
    ZeroTest,
};
use serde_json::{json, Map, Value};

use crate::args::{Cli, Command, MetricChoice, Variant};
use crate::report::{Failure, Outcome};

type Run = Result<Outcome, Failure>;

pub struct Ctx<'a> {
    cli: &'a Cli,
    probe: Probe,
    pub inputs: Map<String, Value>,
    manifold: Option<Manifold>,
}

impl<'a> Ctx<'a> {
    pub fn new(cli: &'a Cli) -> Self {
        let mut inputs = Map::new();
        inputs.insert("seed".into(), json!(cli.seed));
        Ctx { cli, probe: Probe::with_seed(cli.seed), inputs, manifold: None }
    }

    fn echo(&mut self, key: &str, v: Value) {
        self.inputs.insert(key.into(), v);
    }

    fn path_text(p: &Path) -> String {
        p.display().to_string()
    }

    fn load_manifold(&mut self) -> Result<Option<Manifold>, Failure> {
        if self.manifold.is_none() {
            if let Some(path) = &self.cli.manifold {
                self.echo("manifold", json!(Self::path_text(path)));
                self.manifold = Some(config::load_manifold(path, &self.probe)?);
            }
        }
        Ok(self.manifold.clone())
    }

    /// Coordinates from --manifold, --coords or --dim, which must agree.
    fn coords(&mut self) -> Result<Coords, Failure> {
        let from_manifold = self.load_manifold()?.map(|m| m.coords().clone());
        let from_flags = match (&self.cli.coords, self.cli.dim) {
            (Some(names), dim) => {
                let c = Coords::new(names)?;
                if let Some(d) = dim.filter(|&d| d != c.len()) {
                    return Err(Error::DimensionMismatch { expected: d, found: c.len() }.into());
                }
                Some(c)
            }
            (None, Some(d)) => Some(Coords::standard(d)),
            (None, None) => None,
        };
        let coords = match (from_manifold, from_flags) {
            (Some(m), Some(f)) if m != f => {
                if self.cli.coords.is_none() && m.len() == f.len() {
                    m
                } else {
                    return Err(Error::CoordinateMismatch(m.names().join(","), f.names().join(",")).into());
                }
            }
            (Some(m), _) => m,
            (None, Some(f)) => f,
            (None, None) => return Err(Failure::usage("one of --dim, --coords or --manifold is required")),
        };
        self.echo("coords", json!(coords.names()));
        Ok(coords)
    }

    fn forms(&mut self, coords: &Coords) -> Result<Vec<Form>, Failure> {
        let texts = &self.cli.form;
        self.echo("form", json!(texts));
        let forms: Vec<Form> = texts.iter().map(|t| parse_form(t, coords)).collect::<Result<_, _>>()?;
        let canonical: Vec<String> = forms.iter().map(|f| f.to_string()).collect();
        self.echo("form", json!(canonical));
        Ok(forms)
    }

    fn one_form(&mut self) -> Result<(Coords, Form), Failure> {
        if self.cli.form.len() != 1 {
            return Err(Failure::usage(format!("expected exactly one --form, got {}", self.cli.form.len())));
        }
        let coords = self.coords()?;
        let f = self.forms(&coords)?.remove(0);
        Ok((coords, f))
    }

    fn exprs(&mut self) -> Result<Vec<Expr>, Failure> {
        self.echo("expr", json!(self.cli.expr));
        let es: Vec<Expr> = self.cli.expr.iter().map(|t| parse_expr(t)).collect::<Result<_, _>>()?;
        self.echo("expr", json!(es.iter().map(|e| e.to_string()).collect::<Vec<_>>()));
        Ok(es)
    }

    fn pseudos(&mut self, ambient: &Coords) -> Result<Vec<Pseudostructure>, Failure> {
        let paths = self.cli.pseudo.clone();
        self.echo("pseudo", json!(paths.iter().map(|p| Self::path_text(p)).collect::<Vec<_>>()));
        paths
            .iter()
            .map(|p| config::load_pseudostructure(p, ambient, &self.probe).map_err(Failure::from))
            .collect()
    }

    fn one_pseudo(&mut self, ambient: &Coords) -> Result<Pseudostructure, Failure> {
        if self.cli.pseudo.len() != 1 {
            return Err(Failure::usage(format!("expected exactly one --pseudo, got {}", self.cli.pseudo.len())));
        }
        Ok(self.pseudos(ambient)?.remove(0))
    }

    fn balance(&mut self) -> Result<BalanceSystem, Failure> {
        let path = self.cli.balance.clone().ok_or_else(|| Failure::usage("--balance is required"))?;
        self.echo("balance", json!(Self::path_text(&path)));
        Ok(config::load_balance(&path, &self.probe)?)
    }

    /// Manifold carrying the metric selected by --metric.
    fn metric_manifold(&mut self, coords: &Coords) -> Result<Manifold, Failure> {
        let loaded = self.load_manifold()?;
        let base = loaded.clone().unwrap_or_else(|| Manifold::new(coords.clone()));
        let choice = match self.cli.metric {
            Some(c) => c,
            None if loaded.as_ref().is_some_and(|m| m.metric().is_some()) => MetricChoice::File,
            None => MetricChoice::Euclid,
        };
        self.echo("metric", json!(match choice {
            MetricChoice::Euclid => "euclid",
            MetricChoice::File => "file",
        }));
        match choice {
            MetricChoice::Euclid => Ok(base.with_metric(Metric::euclidean(coords.len()))?),
            MetricChoice::File => {
                if loaded.is_none() {
                    return Err(Failure::usage("--metric file needs --manifold"));
                }
                base.require_metric()?;
                Ok(base)
            }
        }
    }
}

fn text(f: &Form) -> Value {
    json!(f.to_string())
}

fn components(f: &Form) -> Value {
    let m: Map<String, Value> = f.terms().map(|(i, c)| (f.basis_text(i.indices()), json!(c.to_string()))).collect();
    Value::Object(m)
}

fn zero_test(z: ZeroTest) -> Value {
    serde_json::to_value(z).expect("serializable")
}

fn commutator_json(r: &CommutatorReport, probe: &Probe) -> Value {
    json!({
        "total": text(&r.total),
        "coefficient_term": text(&r.coefficient_term),
        "metric_term": text(&r.metric_term),
        "components": components(&r.total),
        "zero_test": zero_test(r.verdict(probe)),
    })
}

fn pseudo_json(pi: &Pseudostructure) -> Value {
    let map: Map<String, Value> =
        pi.ambient().names().iter().zip(pi.map()).map(|(x, e)| (x.clone(), json!(e.to_string()))).collect();
    json!({ "params": pi.params().names(), "map": map })
}

pub fn run(cmd: &Command, ctx: &mut Ctx) -> Run {
    let probe = ctx.probe;
    match cmd {
        Command::Wedge => {
            if ctx.cli.form.len() < 2 {
                return Err(Failure::usage("wedge needs at least two --form values"));
            }
            let coords = ctx.coords()?;
            let forms = ctx.forms(&coords)?;
            let mut acc = forms[0].clone();
            for f in &forms[1..] {
                acc = acc.wedge(f)?;
            }
            Ok(Outcome::ok(text(&acc), acc.to_string()))
        }
        Command::D => {
            let (_, f) = ctx.one_form()?;
            let d = f.d_flat();
            Ok(Outcome::ok(text(&d), d.to_string()))
        }
        Command::DEvo => {
            let (coords, f) = ctx.one_form()?;
            let m = ctx.load_manifold()?.unwrap_or_else(|| Manifold::new(coords));
            let d = manifold::d_evolutionary(&m, &f)?;
            Ok(Outcome::ok(text(&d), d.to_string()))
        }
        Command::Commutator => {
            let (coords, f) = ctx.one_form()?;
            let m = ctx.load_manifold()?.unwrap_or_else(|| Manifold::new(coords));
            let r = manifold::commutator(&m, &f)?;
            let mut out = commutator_json(&r, &probe);
            out["deforming"] = json!(manifold::is_deforming_with(&m, &probe));
            Ok(Outcome::ok(out, r.total.to_string()))
        }
        Command::Closure => closure(ctx),
        Command::Star | Command::Delta | Command::Laplacian => {
            let (coords, f) = ctx.one_form()?;
            let m = ctx.metric_manifold(&coords)?;
            let out = match cmd {
                Command::Star => hodge::star(&m, &f)?,
                Command::Delta => hodge::delta(&m, &f)?,
                _ => {
                    let v = match ctx.cli.variant {
                        Variant::Standard => LaplacianVariant::Standard,
                        Variant::Paper => LaplacianVariant::Paper,
                    };
                    ctx.echo("variant", serde_json::to_value(v).expect("serializable"));
                    hodge::laplacian(&m, &f, v)?
                }
            };
            Ok(Outcome::ok(text(&out), out.to_string()))
        }
        Command::Pullback | Command::Dpi => {
            let (coords, f) = ctx.one_form()?;
            let pi = ctx.one_pseudo(&coords)?;
            let out = if matches!(cmd, Command::Pullback) {
                pseudostructure::pullback(&pi, &f)?
            } else {
                pseudostructure::d_pi(&pi, &f)?
            };
            Ok(Outcome::ok(text(&out), out.to_string()))
        }
        Command::Jacobian => {
            let es = ctx.exprs()?;
            let vars = ctx.cli.vars.clone().ok_or_else(|| Failure::usage("--vars is required"))?;
            ctx.echo("vars", json!(vars));
            let det = pseudostructure::jacobian_determinant(&es, &vars)?;
            let matrix: Vec<Vec<String>> = pseudostructure::jacobian_matrix(&es, &vars)
                .iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect())
                .collect();
            let locus = pseudostructure::degenerate_locus_with(&det, &probe);
            let factors: Vec<Value> = locus
                .components
                .iter()
                .map(|c| json!({ "factor": c.factor.to_string(), "multiplicity": c.multiplicity }))
                .collect();
            let out = json!({
                "determinant": det.to_string(),
                "matrix": matrix,
                "unit": locus.unit.to_string(),
                "factors": factors,
            });
            Ok(Outcome::ok(out, det.to_string()))
        }
        Command::Poisson => {
            let es = ctx.exprs()?;
            if es.len() != 2 {
                return Err(Failure::usage("poisson needs exactly two --expr values"));
            }
            let raw = ctx.cli.pairs.clone().ok_or_else(|| Failure::usage("--pairs is required"))?;
            let pairs: Vec<(String, String)> = raw
                .iter()
                .map(|s| match s.split_once(':') {
                    Some((q, p)) => Ok((q.trim().to_string(), p.trim().to_string())),
                    None => Err(Failure::usage(format!("pair `{s}` is not of the form q:p"))),
                })
                .collect::<Result<_, _>>()?;
            ctx.echo("pairs", json!(pairs.iter().map(|(q, p)| format!("{q}:{p}")).collect::<Vec<_>>()));
            let coords = if ctx.cli.dim.is_some() || ctx.cli.coords.is_some() || ctx.cli.manifold.is_some() {
                ctx.coords()?
            } else {
                Coords::new(pairs.iter().flat_map(|(q, p)| [q.clone(), p.clone()]).collect::<Vec<_>>())?
            };
            let b = pseudostructure::poisson_bracket(&coords, &es[0], &es[1], &pairs)?;
            Ok(Outcome::ok(json!(b.to_string()), b.to_string()))
        }
        Command::Locus => {
            let es = ctx.exprs()?;
            if es.len() != 1 {
                return Err(Failure::usage("locus needs exactly one --expr"));
            }
            let rep = pseudostructure::degenerate_locus_with(&es[0], &probe);
            let summary = format!("{} component(s)", rep.components.len());
            Ok(Outcome::ok(serde_json::to_value(&rep).expect("serializable"), summary))
        }
        Command::Relation => {
            let b = ctx.balance()?;
            let r = evolution::build_relation(&b)?;
            let verdict = evolution::nonidentity_check_with(&r, &probe);
            let dec = evolution::commutator_decomposition(&r);
            let out = json!({
                "psi": r.psi,
                "omega": text(&r.omega),
                "degree": r.degree(),
                "commutator": commutator_json(&r.commutator, &probe),
                "quantum_term": text(&dec.quantum_term),
                "deformation_term": text(&dec.deformation_term),
                "verdict": verdict,
            });
            Ok(Outcome::ok(out, format!("{verdict:?}")))
        }
        Command::Transform => {
            let b = ctx.balance()?;
            let r = evolution::build_relation(&b)?;
            let pi = ctx.one_pseudo(&b.coords)?;
            let before = r.commutator.clone();
            let outcome = evolution::attempt_degenerate_transformation(&r, &pi, &probe)?;
            let original = json!({
                "omega": text(&r.omega),
                "commutator": text(&r.commutator.total),
                "verdict": evolution::nonidentity_check_with(&r, &probe),
                "unchanged": r.commutator == before,
            });
            Ok(match outcome {
                TransformOutcome::Identical(ir) => {
                    let theta = ir.antiderivative.as_ref().map(|t| t.to_string());
                    Outcome::ok(
                        json!({
                            "pseudostructure": pseudo_json(&ir.pseudostructure),
                            "restricted": text(&ir.restricted),
                            "antiderivative": theta,
                            "original": original,
                        }),
                        format!("identical on pseudostructure; theta = {}", theta.as_deref().unwrap_or("-")),
                    )
                }
                TransformOutcome::NotClosed(f) => Outcome::closure_failed(
                    json!({
                        "pseudostructure": pseudo_json(&pi),
                        "restricted": text(&f.restricted),
                        "residual": components(&f.residual),
                        "zero_test": zero_test(f.verdict),
                        "original": original,
                    }),
                    format!("not closed on pseudostructure: d_pi = {}", f.residual),
                ),
            })
        }
        Command::Integrate => integrate(ctx),
        Command::Classify { p, k, big_n, n } => {
            ctx.echo("p", json!(p));
            ctx.echo("k", json!(k));
            ctx.echo("N", json!(big_n));
            if let Some(n) = n {
                ctx.echo("n", json!(n));
            }
            let c = classify_with(*p, *k, *big_n, *n)?;
            let summary = format!("{}, pseudostructure dimension {}", c.interaction, c.pseudostructure_dim);
            Ok(Outcome::ok(serde_json::to_value(c).expect("serializable"), summary))
        }
    }
}

fn closure(ctx: &mut Ctx) -> Run {
    let probe = ctx.probe;
    let (coords, f) = ctx.one_form()?;
    match ctx.cli.pseudo.len() {
        0 => {
            let d = f.d_flat();
            let z = d.zero_test_with(&probe);
            let out = json!({ "differential": text(&d), "zero_test": zero_test(z) });
            Ok(if z == ZeroTest::Zero {
                Outcome::ok(out, "closed")
            } else {
                Outcome::closure_failed(out, format!("not closed: d = {d}"))
            })
        }
        _ => {
            let pi = ctx.one_pseudo(&coords)?;
            let dpi = pseudostructure::d_pi(&pi, &f)?;
            let z = dpi.zero_test_with(&probe);
            let with_metric = ctx.cli.metric.is_some() || ctx.load_manifold()?.is_some_and(|m| m.metric().is_some());
            let mut out = json!({ "d_pi": text(&dpi), "zero_test": zero_test(z) });
            let mut ok = z == ZeroTest::Zero;
            if with_metric {
                let m = ctx.metric_manifold(&coords)?;
                let dual = pseudostructure::defines_pseudostructure(&m, &pi, &f, &probe)?;
                out["dual"] = json!({
                    "d_pi_star": text(&pseudostructure::d_pi(&pi, &hodge::star(&m, &f)?)?),
                    "zero_test": zero_test(dual.dual_closed),
                });
                ok = dual.holds();
            }
            Ok(if ok {
                Outcome::ok(out, "closed on pseudostructure")
            } else {
                Outcome::closure_failed(out, "not closed on pseudostructure")
            })
        }
    }
}

fn integrate(ctx: &mut Ctx) -> Run {
    let probe = ctx.probe;
    if ctx.cli.balance.is_some() {
        let b = ctx.balance()?;
        let r = evolution::build_relation(&b)?;
        // each stage's pseudostructure maps into the previous parameter space
        let mut pis = Vec::new();
        let mut ambient = b.coords.clone();
        let paths = ctx.cli.pseudo.clone();
        ctx.echo("pseudo", json!(paths.iter().map(|p| Ctx::path_text(p)).collect::<Vec<_>>()));
        for p in &paths {
            let pi = config::load_pseudostructure(p, &ambient, &probe)?;
            ambient = pi.params().clone();
            pis.push(pi);
        }
        let chain = evolution::sequential_integration(&r, &pis, &probe)?;
        let stages: Vec<Value> = chain
            .stages
            .iter()
            .map(|s| {
                json!({
                    "k": s.k,
                    "pseudostructure": pseudo_json(&s.relation.pseudostructure),
                    "restricted": text(&s.relation.restricted),
                    "antiderivative": s.relation.antiderivative.as_ref().map(|t| t.to_string()),
                })
            })
            .collect();
        let failure = chain.failure.as_ref().map(|f| {
            json!({
                "k": f.k,
                "restricted": text(&f.failure.restricted),
                "residual": components(&f.failure.residual),
                "zero_test": zero_test(f.failure.verdict),
            })
        });
        let ks: Vec<String> = chain.stages.iter().map(|s| s.k.to_string()).collect();
        let out = json!({ "stages": stages, "failure": failure });
        return Ok(if chain.failure.is_none() {
            Outcome::ok(out, format!("stages k = {}", ks.join(", ")))
        } else {
            Outcome::closure_failed(out, format!("stopped after {} stage(s)", ks.len()))
        });
    }
    let (_, f) = ctx.one_form()?;
    match evolution::poincare_antiderivative_with(&f, &probe) {
        Ok(theta) => Ok(Outcome::ok(text(&theta), theta.to_string())),
        Err(Error::NotClosed(_)) => {
            let d = f.d_flat();
            Ok(Outcome::closure_failed(json!({ "residual": components(&d) }), format!("not closed: d = {d}")))
        }
        Err(e) => Err(e.into()),
    }
}
