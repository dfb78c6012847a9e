//! `qrgraph`: generators, counters, defects, regularity and the
//! `ε`-polynomial behind one reproducible command line.

mod commands;
mod config;
mod experiments;
mod fail;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{ExperimentConfig, Format};
use fail::{usage, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "qrgraph",
    version,
    about = "Hereditary subgraph-count quasirandomness experiments"
)]
struct Cli {
    /// Base seed; every random choice derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 1 gives byte-identical reruns.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file (stdout when absent).
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Tolerance override `name=value`, repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Constant `c'` of the theorem's tolerance `c' ε^c`.
    #[arg(long = "c-prime", global = true, default_value_t = 1.0)]
    c_prime: f64,
    #[command(subcommand)]
    command: Command,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = v
        .parse()
        .map_err(|_| format!("tolerance {k} is not a number: {v:?}"))?;
    Ok((k.to_string(), v))
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Generate a graph as an edge list, with a JSON sidecar next to `-o`.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Labelled, unlabelled and homomorphic copies of a pattern.
    Count(CountArgs),
    /// Defect of a graph for one count property.
    Defect(DefectArgs),
    /// Irregularity witnesses and regularity levels of a vertex-set pair.
    Regularity(RegularityArgs),
    /// Density-increment trace from a starting pair.
    Increment(IncrementArgs),
    /// Exact `ε`-polynomial of a pattern in the two-block template.
    Polynomial(PolynomialArgs),
    /// Scripted experiment: CSV row per instance plus a JSON summary.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GenKind {
    /// Binomial random graph.
    Gnp {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'p')]
        p: f64,
    },
    /// Blow-up of a `k × k` weight matrix given row by row.
    Template {
        #[arg(short = 'k')]
        k: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    /// Four-block graph with the triangle count of `G(n, 1/2)`; `n` divisible by 4.
    Counterexample {
        #[arg(short = 'n')]
        n: usize,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct CountArgs {
    pub graph: PathBuf,
    /// Built-in pattern name or an edge-list file.
    #[arg(long)]
    pub pattern: String,
    /// Restrict to a vertex set such as `0-9,12`.
    #[arg(long)]
    pub set: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct DefectArgs {
    pub graph: PathBuf,
    /// One of P, Pstar, Q, R.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub pattern: String,
    #[arg(short = 'p')]
    pub p: f64,
    /// Exhaustive search (the default when --samples is absent).
    #[arg(long, conflicts_with = "samples")]
    pub exact: bool,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub no_local_search: bool,
    /// Fixed assignment of pattern vertices to parts for family R.
    #[arg(long, value_delimiter = ',')]
    pub permutation: Option<Vec<usize>>,
}

#[derive(Args, Debug, Serialize)]
pub struct PairArgs {
    /// First set, e.g. `0-49`.
    #[arg(long = "set-a")]
    pub a: Option<String>,
    /// Second set.
    #[arg(long = "set-b")]
    pub b: Option<String>,
    /// Block sidecar written by `gen`.
    #[arg(long)]
    pub blocks: Option<PathBuf>,
    /// Two block indices from --blocks.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub pair: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    Lower,
    Upper,
    Both,
}

#[derive(Args, Debug, Serialize)]
pub struct RegularityArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub pair: PairArgs,
    /// Reference density, `num/den` or decimal; defaults to `d(A, B)`.
    #[arg(short = 'q')]
    pub q: Option<String>,
    #[arg(long, default_value = "0")]
    pub eps: String,
    #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
    pub direction: DirectionArg,
    /// Exhaustive search; needs |A| + |B| <= 24.
    #[arg(long, conflicts_with = "restarts")]
    pub exact: bool,
    /// Hill-climb restarts besides the degree-split start.
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct IncrementArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value = "K3")]
    pub pattern: String,
    /// Reference density, `num/den` or decimal.
    #[arg(short = 'p')]
    pub p: String,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
    /// Measured Q defect used in the step preconditions.
    #[arg(long, default_value = "0")]
    pub delta_q: String,
    /// Stop instead of stepping when a step precondition fails.
    #[arg(long)]
    pub enforce_preconditions: bool,
    #[arg(long, default_value_t = 0)]
    pub min_size: usize,
    /// Rational arithmetic for every threshold.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct PolynomialArgs {
    #[arg(long)]
    pub pattern: String,
    /// `num/den` or decimal, read exactly.
    #[arg(short = 'p')]
    pub p: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    Theorem1Scaling,
    IncrementTrace,
    GirthVanishing,
    CounterexampleSeparation,
    SplitConcentration,
}

#[derive(Args, Debug, Serialize)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    #[arg(short = 'n')]
    pub n: Option<usize>,
    /// Reference density; read exactly by girth-vanishing.
    #[arg(short = 'p')]
    pub p: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Instances (graph or split seeds) per setting.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Pattern name, or a comma-separated list for girth-vanishing.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Planted `|d(A, B)/p - 1|` for increment-trace.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub no_local_search: bool,
    /// Rational arithmetic in increment-trace.
    #[arg(long)]
    pub exact: bool,
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| fail::CliError::Invariant(format!("thread pool: {e}")))?;
    }
    let (name, args) = match &cli.command {
        Command::Gen { kind } => ("gen", serde_json::to_value(kind)),
        Command::Count(a) => ("count", serde_json::to_value(a)),
        Command::Defect(a) => ("defect", serde_json::to_value(a)),
        Command::Regularity(a) => ("regularity", serde_json::to_value(a)),
        Command::Increment(a) => ("increment", serde_json::to_value(a)),
        Command::Polynomial(a) => ("polynomial", serde_json::to_value(a)),
        Command::Experiment(a) => ("experiment", serde_json::to_value(a)),
    };
    let cfg = ExperimentConfig {
        command: name.to_string(),
        args: args.expect("arguments serialise"),
        seed: cli.seed,
        threads: cli.threads,
        format: cli.format,
        prng: qrgraph::PRNG_NAME,
        tolerances: cli.tol.iter().cloned().collect::<BTreeMap<_, _>>(),
        c_prime: cli.c_prime,
    };
    let target = cli.output.as_deref();
    if let Command::Gen { kind } = &cli.command {
        return commands::gen(&cfg, kind, target);
    }
    let out = match &cli.command {
        Command::Gen { .. } => unreachable!(),
        Command::Count(a) => commands::count(a)?,
        Command::Defect(a) => commands::defect(&cfg, a)?,
        Command::Regularity(a) => commands::regularity(&cfg, a)?,
        Command::Increment(a) => commands::increment(&cfg, a)?,
        Command::Polynomial(a) => commands::polynomial(a)?,
        Command::Experiment(a) => experiments::run(&cfg, a)?,
    };
    output::emit(&cfg, &out, target)?;
    match out.violation {
        Some(msg) => Err(fail::CliError::Invariant(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
