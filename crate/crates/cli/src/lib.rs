//! Command-line front end for qcat workspaces.
//!
//! Every command prints a report whose first block is machine-readable
//! (`key: value` lines up to a `---` line). Exit codes: 0 pass, 1
//! counterexample found, 2 input error.

pub mod commands;
pub mod report;
pub mod workspace;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use qcat::squares::Route;
use qcat::Limits;

use crate::commands::Options;
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "qcat", version, about = "Quantale-enriched categories, relation liftings and coalgebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for batteries (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Size guard for enumerated categories.
    #[arg(long, global = true, default_value_t = 4096)]
    pub max_objects: usize,
    /// Seed for sampled batteries.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// How collages are composed.
    #[arg(long, global = true, default_value = "pushout", value_parser = parse_route)]
    pub route: Route,
}

fn parse_route(s: &str) -> Result<Route, String> {
    s.parse().map_err(|e: qcat::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a workspace.
    Validate { workspace: PathBuf },
    /// Compose two modules, by matrices and by both collage routes.
    Compose {
        workspace: PathBuf,
        /// The module applied first (`R` in `S · R`).
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// The collage of a module and its round trip.
    Collage {
        workspace: PathBuf,
        #[arg(long)]
        module: String,
    },
    /// Exactness of squares, optionally after applying a functor expression.
    Exact {
        workspace: PathBuf,
        #[arg(long)]
        square: Option<String>,
        #[arg(long)]
        functor: Option<String>,
    },
    /// The cocomma object of two functors with a common source.
    Cocomma {
        workspace: PathBuf,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Surjective / fully faithful factorisation of a functor.
    Factorize {
        workspace: PathBuf,
        #[arg(long)]
        functor: String,
    },
    /// Lift a module along a functor expression.
    Lift {
        workspace: PathBuf,
        #[arg(long)]
        functor: String,
        #[arg(long)]
        module: String,
    },
    /// Functoriality battery for a functor expression.
    Battery {
        workspace: PathBuf,
        #[arg(long)]
        functor: String,
        /// Random samples on top of the workspace's own modules and functors.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Beck-Chevalley battery for a functor expression.
    Bcc {
        workspace: PathBuf,
        #[arg(long)]
        functor: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Distributive-law diagrams over the presheaf monad.
    Delta {
        workspace: PathBuf,
        #[arg(long)]
        functor: String,
        #[arg(long)]
        category: Vec<String>,
    },
    /// Evaluate a formula on a model.
    Eval {
        workspace: PathBuf,
        #[arg(long)]
        model: String,
        /// A formula name or inline JSON.
        #[arg(long)]
        formula: String,
        #[arg(long)]
        state: Option<String>,
        /// Also compute ∇ through the collage lifting and compare.
        #[arg(long)]
        cross_check: bool,
    },
    /// Coalgebra morphisms between two coalgebras.
    Morphisms {
        workspace: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// The largest simulation between two coalgebras.
    Simulate {
        workspace: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 1000)]
        max_iterations: usize,
    },
    /// Bisimilarity closure over the morphisms among some coalgebras.
    Bisim {
        workspace: PathBuf,
        #[arg(long)]
        coalgebra: Vec<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Compose { .. } => "compose",
            Command::Collage { .. } => "collage",
            Command::Exact { .. } => "exact",
            Command::Cocomma { .. } => "cocomma",
            Command::Factorize { .. } => "factorize",
            Command::Lift { .. } => "lift",
            Command::Battery { .. } => "battery",
            Command::Bcc { .. } => "bcc",
            Command::Delta { .. } => "delta",
            Command::Eval { .. } => "eval",
            Command::Morphisms { .. } => "morphisms",
            Command::Simulate { .. } => "simulate",
            Command::Bisim { .. } => "bisim",
        }
    }

    fn workspace(&self) -> &PathBuf {
        match self {
            Command::Validate { workspace }
            | Command::Compose { workspace, .. }
            | Command::Collage { workspace, .. }
            | Command::Exact { workspace, .. }
            | Command::Cocomma { workspace, .. }
            | Command::Factorize { workspace, .. }
            | Command::Lift { workspace, .. }
            | Command::Battery { workspace, .. }
            | Command::Bcc { workspace, .. }
            | Command::Delta { workspace, .. }
            | Command::Eval { workspace, .. }
            | Command::Morphisms { workspace, .. }
            | Command::Simulate { workspace, .. }
            | Command::Bisim { workspace, .. } => workspace,
        }
    }
}

/// Runs one command to a report.
pub fn run(cli: &Cli) -> Report {
    let name = cli.command.name();
    let limits = Limits { max_objects: cli.max_objects };
    let opts = Options { limits, seed: cli.seed, route: cli.route };
    let ws = match workspace::load(cli.command.workspace(), limits) {
        Ok(ws) => ws,
        Err(e) => return Report::input_error(name, &e.to_string()),
    };
    use commands as c;
    let outcome = match &cli.command {
        Command::Validate { .. } => c::validate(&ws),
        Command::Compose { first, second, .. } => c::compose(&ws, first, second, opts),
        Command::Collage { module, .. } => c::collage_cmd(&ws, module),
        Command::Exact { square, functor, .. } => c::exact(&ws, square.as_deref(), functor.as_deref(), opts),
        Command::Cocomma { f, g, .. } => c::cocomma_cmd(&ws, f, g),
        Command::Factorize { functor, .. } => c::factorize_cmd(&ws, functor),
        Command::Lift { functor, module, .. } => c::lift(&ws, functor, module, opts),
        Command::Battery { functor, samples, .. } => c::battery(&ws, functor, *samples, opts),
        Command::Bcc { functor, samples, .. } => c::bcc(&ws, functor, *samples, opts),
        Command::Delta { functor, category, .. } => c::delta(&ws, functor, category, opts),
        Command::Eval { model, formula, state, cross_check, .. } => {
            c::eval(&ws, model, formula, state.as_deref(), *cross_check, opts)
        }
        Command::Morphisms { from, to, .. } => c::morphisms(&ws, from, to),
        Command::Simulate { from, to, max_iterations, .. } => c::simulate(&ws, from, to, *max_iterations, opts),
        Command::Bisim { coalgebra, .. } => c::bisim(&ws, coalgebra),
    };
    outcome.unwrap_or_else(|e| Report::input_error(name, &e))
}
