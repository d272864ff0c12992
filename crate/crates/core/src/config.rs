//! JSON configuration files for manifolds, pseudostructures and balance
//! systems.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::evolution::BalanceSystem;
use crate::forms::Coords;
use crate::hodge::Metric;
use crate::manifold::{Connection, Manifold};
use crate::pseudostructure::Pseudostructure;
use crate::symexpr::{parse_expr, Expr, Probe};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub dim: usize,
    #[serde(default)]
    pub coords: Option<Vec<String>>,
    #[serde(default)]
    pub gamma: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default)]
    pub metric: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudoConfig {
    pub params: Vec<String>,
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceConfig {
    pub coords: Vec<String>,
    #[serde(rename = "A")]
    pub a: Vec<String>,
    pub psi: String,
    #[serde(default)]
    pub manifold: Option<String>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("{what}: {e}")))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn expr_at(what: &str, text: &str) -> Result<Expr> {
    parse_expr(text).map_err(|e| Error::Config(format!("{what}: {e}")))
}

fn matrix(what: &str, n: usize, rows: &[Vec<String>]) -> Result<Vec<Vec<Expr>>> {
    if rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            row.iter().enumerate().map(|(j, s)| expr_at(&format!("{what}[{i}][{j}]"), s)).collect()
        })
        .collect()
}

impl ManifoldConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json("manifold", text)
    }

    pub fn build(&self, probe: &Probe) -> Result<Manifold> {
        let n = self.dim;
        let coords = match &self.coords {
            Some(names) if names.len() != n => {
                return Err(Error::DimensionMismatch { expected: n, found: names.len() })
            }
            Some(names) => Coords::new(names)?,
            None => Coords::standard(n),
        };
        let mut m = Manifold::new(coords);
        if let Some(gamma) = &self.gamma {
            if gamma.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: gamma.len() });
            }
            let table = gamma
                .iter()
                .enumerate()
                .map(|(s, plane)| matrix(&format!("gamma[{s}]"), n, plane))
                .collect::<Result<_>>()?;
            m = m.with_connection(Connection::new(table)?)?;
        }
        if let Some(g) = &self.metric {
            m = m.with_metric(Metric::new_with(matrix("metric", n, g)?, probe)?)?;
        }
        Ok(m)
    }
}

impl PseudoConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json("pseudostructure", text)
    }

    /// Every ambient coordinate must be mapped.
    pub fn build(&self, ambient: &Coords, probe: &Probe) -> Result<Pseudostructure> {
        if let Some(k) = self.map.keys().find(|k| ambient.index_of(k).is_none()) {
            return Err(Error::UnknownCoordinate(k.clone()));
        }
        let map = ambient
            .names()
            .iter()
            .map(|x| match self.map.get(x) {
                Some(s) => expr_at(&format!("map.{x}"), s),
                None => Err(Error::Config(format!("pseudostructure: no map entry for `{x}`"))),
            })
            .collect::<Result<_>>()?;
        Pseudostructure::new_with(Coords::new(&self.params)?, ambient.clone(), map, probe)
    }
}

impl BalanceConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json("balance", text)
    }

    /// `base` resolves a relative manifold path.
    pub fn build(&self, base: Option<&Path>, probe: &Probe) -> Result<BalanceSystem> {
        let coords = Coords::new(&self.coords)?;
        let a = self
            .a
            .iter()
            .enumerate()
            .map(|(i, s)| expr_at(&format!("A[{i}]"), s))
            .collect::<Result<_>>()?;
        let mut b = BalanceSystem::new(coords, a, self.psi.clone());
        if let Some(rel) = &self.manifold {
            let path = match base {
                Some(dir) => dir.join(rel),
                None => rel.into(),
            };
            b = b.with_manifold(load_manifold(&path, probe)?);
        }
        Ok(b)
    }
}

pub fn load_manifold(path: &Path, probe: &Probe) -> Result<Manifold> {
    ManifoldConfig::from_json(&read(path)?)?.build(probe)
}

pub fn load_pseudostructure(path: &Path, ambient: &Coords, probe: &Probe) -> Result<Pseudostructure> {
    PseudoConfig::from_json(&read(path)?)?.build(ambient, probe)
}

pub fn load_balance(path: &Path, probe: &Probe) -> Result<BalanceSystem> {
    BalanceConfig::from_json(&read(path)?)?.build(path.parent(), probe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::is_deforming;

    #[test]
    fn manifold_from_json() {
        let m = ManifoldConfig::from_json(
            r#"{"dim": 2, "coords": ["u", "v"],
                "gamma": [[["0","0"],["c","0"]], [["0","0"],["0","0"]]],
                "metric": [["1","0"],["0","1"]]}"#,
        )
        .unwrap()
        .build(&Probe::default())
        .unwrap();
        assert_eq!(m.coords().names(), ["u", "v"]);
        assert!(is_deforming(&m));
        assert!(m.metric().is_some());
    }

    #[test]
    fn manifold_errors() {
        let bad_shape = ManifoldConfig::from_json(r#"{"dim": 2, "gamma": [[["0"]]]}"#).unwrap();
        assert!(matches!(bad_shape.build(&Probe::default()), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(ManifoldConfig::from_json(r#"{"dim": 2, "extra": 1}"#), Err(Error::Config(_))));
        let bad_expr = ManifoldConfig::from_json(r#"{"dim": 1, "metric": [["1 +"]]}"#).unwrap();
        assert!(matches!(bad_expr.build(&Probe::default()), Err(Error::Config(_))));
    }

    #[test]
    fn pseudostructure_from_json() {
        let cfg = PseudoConfig::from_json(r#"{"params": ["t"], "map": {"x1": "t", "x2": "c0"}}"#).unwrap();
        let pi = cfg.build(&Coords::standard(2), &Probe::default()).unwrap();
        assert_eq!(pi.map()[1], "c0".parse().unwrap());
        let missing = PseudoConfig::from_json(r#"{"params": ["t"], "map": {"x1": "t"}}"#).unwrap();
        assert!(matches!(missing.build(&Coords::standard(2), &Probe::default()), Err(Error::Config(_))));
        let extra = PseudoConfig::from_json(r#"{"params": ["t"], "map": {"x1": "t", "x2": "0", "y": "1"}}"#).unwrap();
        assert_eq!(extra.build(&Coords::standard(2), &Probe::default()), Err(Error::UnknownCoordinate("y".into())));
    }

    #[test]
    fn balance_from_json() {
        let b = BalanceConfig::from_json(r#"{"coords": ["xi1", "xi2"], "A": ["xi2", "-xi1"], "psi": "psi"}"#)
            .unwrap()
            .build(None, &Probe::default())
            .unwrap();
        assert_eq!(b.a.len(), 2);
        assert!(b.manifold.is_none());
    }
}
