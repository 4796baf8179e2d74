use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "rdeform", version, about = "Exact computations with deformations of the Riemann hierarchy")]
pub struct Cli {
    #[command(flatten)]
    pub config: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Truncation order E in eps.
    #[arg(long, global = true, env = "RD_EPS_ORDER", default_value_t = 6)]
    pub eps_order: u32,

    /// Cap on the total u-degree of every term.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    pub u_cap: u32,

    /// What to do when a product exceeds the u-degree cap.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Strict)]
    pub mode: Mode,

    /// Declares a parameter, optionally bound: `--param c2` or `--param c2=1/12`.
    #[arg(long = "param", global = true, value_name = "NAME[=p/q]")]
    pub params: Vec<String>,

    /// Seed for commands that draw random inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Series,
}

/// A built-in hierarchy or the first flow `P` of `u_t = dx P` as an expression.
#[derive(Args, Debug, Clone)]
pub struct HierarchyArgs {
    /// `kdv`, `riemann`, or an expression for `P`.
    #[arg(long, default_value = "kdv")]
    pub flows: String,

    /// Highest flow index.
    #[arg(long, default_value_t = 3)]
    pub max_d: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solves for the flow Q_d commuting with u_t = P and starting with u^d/d! u1.
    ReconstructFlow {
        /// Right-hand side P of the first flow (`-` reads standard input).
        flow: String,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        /// Explicit eps^0 part of Q instead of u^d/d! u1.
        #[arg(long)]
        start: Option<String>,
    },
    /// Solves for the conserved quantity extending int u^(d+2)/(d+2)!.
    ReconstructConserved {
        flow: String,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        /// Explicit eps^0 part instead of int u^(d+2)/(d+2)!.
        #[arg(long)]
        start: Option<String>,
    },
    /// Checks that all flows of a hierarchy commute.
    Commute {
        #[command(flatten)]
        hierarchy: HierarchyArgs,
    },
    /// Brings h1 = int(u^3/6 + ...) to generalized standard form.
    ReduceDlyz { functional: String },
    /// Normal form of the first flow u_t = dx P.
    AlmNormalForm {
        /// P, with u^2/2 at eps^0.
        flow: String,
    },
    /// Skew-symmetry and sampled Jacobi identity of an operator.
    PoissonCheck {
        /// Operator with coefficients left of D, e.g. `D + eps^2*(u*D^3 + ...)`.
        operator: String,
        /// Samples are int u^p u_lambda with |lambda| + p up to this weight.
        #[arg(long, default_value_t = rdeform::operators::DEFAULT_SAMPLE_WEIGHT)]
        sample_weight: u32,
    },
    /// Finds a normal Miura transformation taking a Poisson operator to D.
    NormalizePoisson {
        /// Operator; omitted means a random conjugate of D drawn from --seed.
        operator: Option<String>,
        #[arg(long, default_value_t = rdeform::miura::GUARD_SAMPLE_WEIGHT)]
        sample_weight: u32,
    },
    /// Special and tau-symmetry checks of a Hamiltonian hierarchy with K = D.
    TauCheck {
        /// `kdv` or a functional h1.
        #[arg(long, default_value = "kdv")]
        hamiltonian: String,
        #[arg(long, default_value_t = 3)]
        max_d: u32,
    },
    /// Table of closed-form constants up to a genus.
    Constants {
        #[arg(long, default_value_t = 4)]
        max_g: u32,
    },
    /// Integrability constraints on u^2/2 + sum c_lambda eps^|lambda| u_lambda.
    Constraints {
        /// Fixes a template coefficient: `--fix c2=1`.
        #[arg(long = "fix", value_name = "NAME=p/q")]
        fixed: Vec<String>,
        /// Includes odd eps orders in the template.
        #[arg(long)]
        odd: bool,
    },
    /// Checks the relations between the standard form of h1 and the normal form of its flow.
    BridgeCheck {
        /// h1; omitted means a random standard form drawn from --seed.
        functional: Option<String>,
    },
}
