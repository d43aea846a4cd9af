//! `gonlab`: gonality bounds and chip-firing tools from the command line.
//!
//! Exit status: 0 on success, 1 on input errors, 2 when a budget ran out
//! (the partial report is still printed).

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gonlab::randgraph::Mode;

use commands::{Budgets, Outcome, RandomArgs};
use output::Format;

#[derive(Parser)]
#[command(name = "gonlab", version, about = "Lower and upper bounds on graph gonality")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true, conflicts_with = "tsv")]
    json: bool,
    /// Shorthand for `--format tsv`.
    #[arg(long, global = true)]
    tsv: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "GONLAB_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BudgetArgs {
    /// Wall-clock limit for the gonality search.
    #[arg(long, global = true, env = "GONLAB_BUDGET_SECONDS")]
    budget_seconds: Option<f64>,
    /// Effective divisors the gonality search may test.
    #[arg(long, global = true, env = "GONLAB_BUDGET_CANDIDATES", default_value_t = 50_000_000)]
    budget_candidates: u128,
    /// Largest n for exact u-Cheeger enumeration.
    #[arg(long, global = true, env = "GONLAB_BUDGET_CHEEGER_N", default_value_t = 24,
          value_parser = clap::value_parser!(u64).range(1..64))]
    budget_cheeger_n: u64,
    /// Subsets the exact Cheeger enumeration may visit.
    #[arg(long, global = true, env = "GONLAB_BUDGET_SUBSETS", default_value_t = 2_000_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget_subsets: u64,
    /// Search nodes per B_u separator search.
    #[arg(long, global = true, env = "GONLAB_BUDGET_SEPARATOR_NODES", default_value_t = 50_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget_separator_nodes: u64,
    /// Search nodes for the maximum independent set.
    #[arg(long, global = true, env = "GONLAB_BUDGET_MIS_NODES", default_value_t = 20_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget_mis_nodes: u64,
    /// Subtracted divisors a rank query may test.
    #[arg(long, global = true, env = "GONLAB_BUDGET_RANK_CHECKS", default_value_t = 10_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget_rank_checks: u64,
}

#[derive(Subcommand)]
enum Command {
    /// All lower and upper bounds with the final bracket.
    Bounds { graph: String },
    /// Exact gonality by exhaustive search.
    Gonality {
        graph: String,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// u-Cheeger constants on the grid j/n.
    Cheeger {
        graph: String,
        /// Enumerate every subset instead of connected ones.
        #[arg(long)]
        all_subsets: bool,
    },
    /// Minimum separators B_u, for one u or the whole grid.
    Bu {
        graph: String,
        #[arg(long)]
        u: Option<String>,
    },
    /// Algebraic connectivity and the spectral bound.
    Spectral {
        graph: String,
        #[arg(long, default_value_t = gonlab::spectral::DEFAULT_TOL)]
        tol: f64,
    },
    /// v-reduced form of a divisor such as `0:1,4:2`.
    Reduce {
        graph: String,
        divisor: String,
        #[arg(long, default_value_t = 0)]
        vertex: usize,
    },
    /// Whether a divisor has rank at least r.
    Rank {
        graph: String,
        divisor: String,
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Configuration-model experiment on random regular graphs.
    Random {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "simple", value_parser = parse_mode)]
        mode: Mode,
        /// Exact gonality for n up to this (0 disables).
        #[arg(long, default_value_t = 12)]
        gonality_cap: usize,
        /// Exact h_u and B_u for n up to this (0 disables).
        #[arg(long, default_value_t = 20)]
        cheeger_cap: usize,
        /// Per-vertex level for the thm14/n summary.
        #[arg(long)]
        threshold: Option<f64>,
        /// Write every sample as an edge list into this directory.
        #[arg(long)]
        emit_graphs: Option<PathBuf>,
    },
    /// The full Pappus graph walkthrough.
    PappusDemo,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: gonlab::randgraph::RandGraphError| e.to_string())
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let b = &cli.budget;
    let budgets = Budgets {
        seconds: b.budget_seconds,
        candidates: b.budget_candidates,
        cheeger_n: b.budget_cheeger_n as usize,
        subsets: b.budget_subsets,
        separator_nodes: b.budget_separator_nodes,
        mis_nodes: b.budget_mis_nodes,
        rank_checks: b.budget_rank_checks,
    };
    if let Some(s) = budgets.seconds {
        anyhow::ensure!(s > 0.0 && s.is_finite(), "--budget-seconds must be positive");
    }
    match &cli.command {
        Command::Bounds { graph } => commands::bounds(&commands::load(graph)?, &budgets),
        Command::Gonality { graph, max_degree } => {
            commands::gonality(&commands::load(graph)?, &budgets, *max_degree)
        }
        Command::Cheeger { graph, all_subsets } => {
            commands::cheeger(&commands::load(graph)?, &budgets, *all_subsets)
        }
        Command::Bu { graph, u } => commands::bu(&commands::load(graph)?, &budgets, u.as_deref()),
        Command::Spectral { graph, tol } => commands::spectral(&commands::load(graph)?, *tol),
        Command::Reduce { graph, divisor, vertex } => {
            commands::reduce(&commands::load(graph)?, divisor, *vertex)
        }
        Command::Rank { graph, divisor, r } => {
            commands::rank(&commands::load(graph)?, &budgets, divisor, *r)
        }
        Command::Random {
            k,
            n,
            samples,
            seed,
            mode,
            gonality_cap,
            cheeger_cap,
            threshold,
            emit_graphs,
        } => {
            let args = RandomArgs {
                k: *k,
                n: *n,
                samples: *samples,
                seed: *seed,
                mode: *mode,
                gonality_cap: *gonality_cap,
                cheeger_cap: *cheeger_cap,
                threshold: *threshold,
                emit_graphs: emit_graphs.clone(),
            };
            commands::random(&args, &budgets)
        }
        Command::PappusDemo => commands::pappus_demo(&budgets),
    }
}

fn main() -> ExitCode {
    // usage errors are input errors; clap's own code 2 means "exhausted" here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global() {
            eprintln!("error: cannot start {t} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let format = if cli.json {
        Format::Json
    } else if cli.tsv {
        Format::Tsv
    } else {
        cli.format
    };
    match run(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.report.render(format).as_bytes());
            match outcome.exhausted {
                Some(msg) => {
                    eprintln!("budget exhausted: {msg}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
