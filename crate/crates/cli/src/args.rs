use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "formcalc", version, about = "Symbolic exterior calculus with deterministic JSON reports")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// A form such as "(x2) dx1 + (x1) dx2"; repeat for `wedge`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub form: Vec<String>,

    /// Dimension of the coordinate space x1..xn.
    #[arg(long, global = true)]
    pub dim: Option<usize>,

    /// Comma-separated coordinate names (alternative to --dim).
    #[arg(long, global = true, value_delimiter = ',')]
    pub coords: Option<Vec<String>>,

    #[arg(long, global = true, value_name = "FILE")]
    pub manifold: Option<PathBuf>,

    /// Pseudostructure config; repeat for staged integration.
    #[arg(long, global = true, value_name = "FILE")]
    pub pseudo: Vec<PathBuf>,

    #[arg(long, global = true, value_name = "FILE")]
    pub balance: Option<PathBuf>,

    /// `euclid` for the identity metric, `file` for the --manifold metric.
    #[arg(long, global = true)]
    pub metric: Option<MetricChoice>,

    #[arg(long, global = true, default_value = "standard")]
    pub variant: Variant,

    /// Scalar expression; repeat for maps and brackets.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub expr: Vec<String>,

    /// Comma-separated input variables for `jacobian`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,

    /// Canonical pairs for `poisson`, e.g. "q1:p1,q2:p2".
    #[arg(long, global = true, value_delimiter = ',')]
    pub pairs: Option<Vec<String>>,

    /// Seed for probabilistic zero tests and sampling.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,

    /// Pretty-print the JSON record.
    #[arg(long, global = true)]
    pub json: bool,

    /// Human-readable summary on stderr.
    #[arg(long, short = 'v', global = true)]
    pub verbose: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricChoice {
    Euclid,
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Standard,
    Paper,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wedge product of two or more forms.
    Wedge,
    /// Exterior derivative.
    D,
    /// Evolutionary differential with torsion contributions.
    #[command(name = "d-evo")]
    DEvo,
    /// Commutator of a 1-form, split into coefficient and metric terms.
    Commutator,
    /// Closure in flat space, or on --pseudo (with dual closure when a metric is given).
    Closure,
    /// Hodge dual.
    Star,
    /// Codifferential.
    Delta,
    /// Laplacian; --variant selects dδ+δd or dδ−δd.
    Laplacian,
    /// Restriction of a form to a pseudostructure.
    Pullback,
    /// Interior differential on a pseudostructure.
    Dpi,
    /// Jacobian determinant of --expr components in --vars.
    Jacobian,
    /// Poisson bracket of two --expr values over --pairs.
    Poisson,
    /// Vanishing locus of an --expr.
    Locus,
    /// Evolutionary relation from --balance.
    Relation,
    /// Degenerate transformation of --balance onto --pseudo.
    Transform,
    /// Antiderivative of a closed --form, or staged integration of --balance.
    Integrate,
    /// (p, k, N) structure classification.
    Classify {
        #[arg(short = 'p')]
        p: u32,
        #[arg(short = 'k')]
        k: u32,
        #[arg(short = 'N')]
        big_n: u32,
        /// Dimension of the original space (metadata only).
        #[arg(long = "n")]
        n: Option<u32>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Wedge => "wedge",
            Command::D => "d",
            Command::DEvo => "d-evo",
            Command::Commutator => "commutator",
            Command::Closure => "closure",
            Command::Star => "star",
            Command::Delta => "delta",
            Command::Laplacian => "laplacian",
            Command::Pullback => "pullback",
            Command::Dpi => "dpi",
            Command::Jacobian => "jacobian",
            Command::Poisson => "poisson",
            Command::Locus => "locus",
            Command::Relation => "relation",
            Command::Transform => "transform",
            Command::Integrate => "integrate",
            Command::Classify { .. } => "classify",
        }
    }
}
