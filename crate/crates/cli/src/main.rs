//! Command-line front end for the `lattice-median` library.
//!
//! Every subcommand writes one JSON report (CSV for `drift`) to `--out` or
//! stdout. Exit status: 0 when every checked invariant holds, 1 when one
//! fails or a budget runs out, 2 on usage or input errors.

mod commands;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "lattice-median", version, about = "Median algebras, coarse medians, induced actions and random walks")]
pub struct Cli {
    /// Run the full acceptance suite (same as the `check-all` subcommand).
    #[arg(long, global = false)]
    check_all: bool,

    /// Corpus directory for `--check-all`; the built-in corpus otherwise.
    #[arg(long)]
    corpus: Option<PathBuf>,

    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Report destination; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check M1-M3 on an algebra file.
    VerifyMedian {
        #[arg(long)]
        algebra: PathBuf,
        /// Check this many random quintuples instead of all of them.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Build the free median algebra on `n` generators.
    FreeMedian {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1 << 16)]
        cap: usize,
    },
    /// Algebraic interval `[a, b]`.
    Interval {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    /// A wall separating `x` from `y`.
    Wall {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
    },
    /// Largest cube embedding medianly into the algebra.
    Rank {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
    /// Decide whether a graph is a median graph.
    MedianGraph {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Four-point hyperbolicity constant of a graph or metric file.
    Delta {
        #[arg(long, conflicts_with = "metric", required_unless_present = "metric")]
        graph: Option<PathBuf>,
        #[arg(long)]
        metric: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Measure (C1) and (C2) for the min-sum coarse median of a graph.
    CoarseCheck {
        #[arg(long)]
        graph: PathBuf,
        /// Sample this many sextuples for (C1) instead of all of them.
        #[arg(long)]
        samples: Option<u64>,
        /// Largest subset size for (C2).
        #[arg(long, default_value_t = 6)]
        p_max: usize,
        /// Random subsets per size for (C2).
        #[arg(long, default_value_t = 50)]
        subsets: usize,
        /// Earlier report whose `h_table` is carried forward.
        #[arg(long)]
        previous: Option<PathBuf>,
    },
    /// Build the induced function space.
    Induce {
        #[command(flatten)]
        files: InductionFiles,
        /// Sample functions when the space is too large to enumerate.
        #[arg(long)]
        sampled: bool,
        /// Include every function in the report.
        #[arg(long)]
        functions: bool,
    },
    /// Verify the induced action exhaustively where budgets allow.
    VerifyInduced {
        #[command(flatten)]
        files: InductionFiles,
        #[arg(long)]
        sampled: bool,
    },
    /// Drift and return-time summary of the simple walk on a homogeneous graph.
    Walk {
        #[command(flatten)]
        files: HomogeneousFiles,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Orbit-return discretization of one walk.
    Discretize {
        #[command(flatten)]
        files: HomogeneousFiles,
        #[arg(long, default_value_t = 1_000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Count returns to the basepoint itself rather than to its orbit.
        #[arg(long)]
        strict: bool,
    },
    /// Drift time series as CSV.
    Drift {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Also write the summary JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Stationary law of the quotient chain against observed return times.
    Kac {
        #[command(flatten)]
        files: HomogeneousFiles,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Translation length and loxodromic classification.
    Translation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        n_max: u64,
        #[arg(long, default_value_t = lattice_median::walks::DEFAULT_LOXODROMIC_THRESHOLD)]
        threshold: f64,
    },
    /// Measure quasi-action constants.
    QuasiCheck {
        #[arg(long)]
        input: PathBuf,
        /// Draw this many samples when the input lists none; all tuples otherwise.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// SL-dimension of a defining graph.
    RaagDsl {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = DslModeArg::SameStar)]
        mode: DslModeArg,
        /// Relation file `{"rel": [[bool]]}`; `prec_max` when omitted.
        #[arg(long)]
        order: Option<PathBuf>,
    },
    /// Run every acceptance criterion.
    CheckAll {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct InductionFiles {
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    action: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct HomogeneousFiles {
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    action: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DslModeArg {
    SameStar,
    Prec,
}

/// Uniform wrapper of every JSON report.
#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub command: &'static str,
    pub status: &'static str,
    /// The invariant that failed, when `status` is not `pass`.
    pub violated: Option<String>,
    pub seed: u64,
    pub report: T,
}

/// What a subcommand hands back to the dispatcher.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let command = match (cli.check_all, cli.command) {
        (true, None) => Command::CheckAll { corpus: cli.corpus },
        (false, Some(c)) => c,
        (true, Some(_)) => {
            eprintln!("error: --check-all takes no subcommand");
            return ExitCode::from(2);
        }
        (false, None) => {
            eprintln!("error: a subcommand is required\n\nRun with --help for usage.");
            return ExitCode::from(2);
        }
    };
    match commands::run(command, &cli.common) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli.common, &outcome.text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(commands::Failure::Budget(text)) => {
            let _ = emit(&cli.common, &text);
            ExitCode::from(1)
        }
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(common: &Common, text: &str) -> std::io::Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}
