mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Failure;

/// Simultaneous identification of causal effects from candidate SA-MPDAGs.
#[derive(Debug, Parser)]
#[command(name = "simid", version)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Arithmetic for distributions.
    #[arg(long, value_enum, global = true, default_value_t = Mode::Exact)]
    mode: Mode,

    /// Comparison tolerance in float mode.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Candidate graph files.
    #[arg(long, num_args = 1.., required = true)]
    graphs: Vec<PathBuf>,

    /// Treatment variables, optionally with a state (`X3=5`).
    #[arg(long, visible_alias = "do", num_args = 1.., value_delimiter = ',', required = true)]
    x: Vec<String>,

    /// Outcome variables.
    #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
    y: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide simultaneous identifiability.
    Identify(QueryArgs),
    /// Print the reduced graph of each candidate for a query.
    Rm(QueryArgs),
    /// List the DAGs represented by a graph.
    Extensions {
        graph: PathBuf,
        /// Fail instead of listing more DAGs than this.
        #[arg(long, default_value_t = simid_core::mpdag::DEFAULT_EXTENSION_CAP)]
        cap: usize,
    },
    /// Chain-graph Markov equivalence of two graphs.
    Equiv { first: PathBuf, second: PathBuf },
    /// Evaluate the identification formula on a distribution.
    Evaluate {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        distribution: PathBuf,
    },
    /// Check a verdict against every represented DAG, or search for a
    /// counterexample when no distribution is given.
    Oracle {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        distribution: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// States per variable in searched densities.
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Write the worked example assets.
    Fixtures {
        #[arg(value_enum)]
        which: FixtureSet,
        /// Target directory (default: $SIMID_OUT_DIR, then the current directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FixtureSet {
    Example1,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = output::Context {
        format: cli.format,
        output: cli.output,
        mode: cli.mode,
        tolerance: cli.tolerance,
    };
    let result = match cli.command {
        Command::Identify(q) => commands::identify(&ctx, &q),
        Command::Rm(q) => commands::rm(&ctx, &q),
        Command::Extensions { graph, cap } => commands::extensions(&ctx, &graph, cap),
        Command::Equiv { first, second } => commands::equiv(&ctx, &first, &second),
        Command::Evaluate { query, distribution } => commands::evaluate(&ctx, &query, &distribution),
        Command::Oracle {
            query,
            distribution,
            trials,
            seed,
            arity,
        } => match distribution {
            Some(d) => commands::oracle_check(&ctx, &query, &d),
            None => commands::oracle_search(&ctx, &query, trials, seed, arity),
        },
        Command::Fixtures { which: FixtureSet::Example1, out } => commands::fixtures(&ctx, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
