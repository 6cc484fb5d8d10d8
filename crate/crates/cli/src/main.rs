//! `rip-lab`: compute and certify RIP parameters, generate seeded random
//! instances, and run planted-clique reduction experiments.
//!
//! Exit codes: 0 success, 1 internal error, 2 parse or parameter error,
//! 3 enumeration budget exceeded, 4 matrix columns are not unit norm.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "rip-lab",
    version,
    about = "Restricted isometry property toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact RIP parameter of a given order by exhaustive enumeration.
    Exact(ExactArgs),
    /// Lazy certification: exact parameter at a probe order, lifted upward.
    Lazy(LazyArgs),
    /// Coherence (max absolute inner product of distinct columns).
    Coherence(CoherenceArgs),
    /// Write a seeded random matrix or graph.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Cholesky reduction of a graph to a matrix.
    Reduce(ReduceArgs),
    /// Spectral refuter: "yes" if a k-clique is possible, else "no-clique".
    Refute(RefuteArgs),
    /// Null-versus-planted distinguishing experiment.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    order: usize,
    /// Stop at the first subset whose deviation exceeds this value.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, default_value_t = rip_lab_core::DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LazyArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    probe_order: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = rip_lab_core::DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CoherenceArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
struct SeedArgs {
    /// Seed value. Required: no command draws entropy.
    #[arg(long)]
    seed: u64,
    /// Substream label.
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

impl SeedArgs {
    fn seed(self) -> rip_lab_core::Seed {
        rip_lab_core::Seed::with_stream(self.seed, self.stream)
    }
}

#[derive(Subcommand, Debug)]
enum GenerateCommand {
    /// n x N matrix with entries +-1/sqrt(n).
    Bernoulli {
        #[arg(long, num_args = 2, value_names = ["n", "N"])]
        dims: Vec<usize>,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Symmetric +-1 matrix with zero diagonal.
    ModelA {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// I + (c/sqrt(n)) A.
    ModelB {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// G(n, 1/2) graph.
    Gnp {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// G(n, 1/2) with a planted t-clique.
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    c: f64,
    #[arg(long, default_value_t = rip_lab_core::DEFAULT_PSD_TOL)]
    psd_tol: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RefuteArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum NullStatArg {
    Spectral,
    Exact,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// desk-200, desk-200-k35, desk-400, or "exponent" (needs --n and --epsilon).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    clique_size: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum)]
    null_statistic: Option<NullStatArg>,
    #[arg(long)]
    budget: Option<u128>,
    /// Block-compose C(G) with an n x N' Bernoulli matrix.
    #[arg(long)]
    rect: bool,
    /// N' for --rect; defaults to (aspect - 1) n.
    #[arg(long)]
    extra_cols: Option<usize>,
    #[arg(long, default_value_t = 4)]
    aspect: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = commands::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.code);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    use commands::*;
    match command {
        Command::Exact(a) => exact(&a.matrix, a.order, a.threshold, a.budget, a.out.as_deref()),
        Command::Lazy(a) => lazy(
            &a.matrix,
            a.probe_order,
            a.delta,
            a.budget,
            a.out.as_deref(),
        ),
        Command::Coherence(a) => coherence(&a.matrix, a.out.as_deref()),
        Command::Generate(g) => match g {
            GenerateCommand::Bernoulli {
                dims,
                seed,
                out,
                report,
            } => generate(
                GenerateKind::Bernoulli {
                    n: dims[0],
                    big_n: dims[1],
                },
                seed.seed(),
                &out,
                report.as_deref(),
            ),
            GenerateCommand::ModelA {
                n,
                seed,
                out,
                report,
            } => generate(
                GenerateKind::ModelA { n },
                seed.seed(),
                &out,
                report.as_deref(),
            ),
            GenerateCommand::ModelB {
                n,
                c,
                seed,
                out,
                report,
            } => generate(
                GenerateKind::ModelB { n, c },
                seed.seed(),
                &out,
                report.as_deref(),
            ),
            GenerateCommand::Gnp {
                n,
                seed,
                out,
                report,
            } => generate(
                GenerateKind::Gnp { n },
                seed.seed(),
                &out,
                report.as_deref(),
            ),
            GenerateCommand::Planted {
                n,
                t,
                seed,
                out,
                report,
            } => generate(
                GenerateKind::Planted { n, t },
                seed.seed(),
                &out,
                report.as_deref(),
            ),
        },
        Command::Reduce(a) => reduce(&a.graph, a.c, a.psd_tol, &a.out, a.report.as_deref()),
        Command::Refute(a) => refute(&a.graph, a.k, a.out.as_deref()),
        Command::Experiment(a) => {
            let spec = ExperimentSpec {
                preset: a.preset,
                epsilon: a.epsilon,
                n: a.n,
                clique_size: a.clique_size,
                k: a.k,
                delta: a.delta,
                c: a.c,
                trials: a.trials,
                seed: a.seed.seed(),
                null_statistic: a.null_statistic.map(|s| match s {
                    NullStatArg::Spectral => rip_lab_core::NullStatistic::SpectralRefuter,
                    NullStatArg::Exact => rip_lab_core::NullStatistic::Exact,
                }),
                budget: a.budget,
                rect: a.rect,
                extra_cols: a.extra_cols,
                aspect: a.aspect,
            };
            experiment(spec, a.out.as_deref())
        }
    }
}
