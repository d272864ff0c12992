//! The `(p, k, N)` structure classification.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Interaction {
    Strong,
    Weak,
    Electromagnetic,
    Gravitational,
}

impl Interaction {
    /// Label for the degree `k` of the realized closed form.
    pub fn for_degree(k: u32) -> Option<Self> {
        match k {
            0 => Some(Interaction::Strong),
            1 => Some(Interaction::Weak),
            2 => Some(Interaction::Electromagnetic),
            3 => Some(Interaction::Gravitational),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Interaction::Strong => "strong",
            Interaction::Weak => "weak",
            Interaction::Electromagnetic => "electromagnetic",
            Interaction::Gravitational => "gravitational",
        }
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructureClass {
    pub p: u32,
    pub k: u32,
    #[serde(rename = "N")]
    pub big_n: u32,
    /// Dimension of the original space; carried as metadata only.
    pub n: Option<u32>,
    pub pseudostructure_dim: u32,
    pub interaction: Interaction,
}

pub fn classify(p: u32, k: u32, big_n: u32) -> Result<StructureClass> {
    classify_with(p, k, big_n, None)
}

pub fn classify_with(p: u32, k: u32, big_n: u32, n: Option<u32>) -> Result<StructureClass> {
    if p > 3 {
        return Err(Error::OutOfRange(format!("p = {p} must be at most 3")));
    }
    if k > p {
        return Err(Error::OutOfRange(format!("k = {k} exceeds p = {p}")));
    }
    if big_n == 0 {
        return Err(Error::OutOfRange("N must be positive".into()));
    }
    if k > big_n {
        return Err(Error::OutOfRange(format!("k = {k} exceeds N = {big_n}")));
    }
    let interaction = Interaction::for_degree(k).expect("k <= 3");
    Ok(StructureClass { p, k, big_n, n, pseudostructure_dim: big_n - k, interaction })
}
