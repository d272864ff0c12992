//! Symbolic exterior calculus: exact scalar expressions, skew-symmetric
//! forms, connections with torsion, metric duality, pullbacks to
//! parametrized pseudostructures, and relations built from balance data.

pub mod batch;
pub mod classify;
pub mod config;
pub mod error;
pub mod evolution;
pub mod forms;
pub mod hodge;
pub mod linalg;
pub mod manifold;
pub mod pseudostructure;
pub mod random;
pub mod symexpr;
pub mod syntax;

pub use batch::Exec;
pub use classify::{classify, Interaction, StructureClass};
pub use error::{Error, Result};
pub use evolution::{BalanceSystem, EvolutionaryRelation, IdenticalRelation};
pub use forms::{Coords, Form, MultiIndex};
pub use hodge::{LaplacianVariant, Metric, Signature};
pub use manifold::{CommutatorReport, Connection, Manifold};
pub use pseudostructure::{DegeneracyReport, Pseudostructure};
pub use symexpr::{parse_expr, Expr, Probe, ZeroTest};
pub use syntax::parse_form;
