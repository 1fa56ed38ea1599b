use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use srp_cli::config::{ExperimentConfig, ExperimentKind};
use srp_cli::experiments::run_experiment;
use std::path::PathBuf;

/// Ranking-process experiment runner.
#[derive(Parser)]
#[command(version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// One subcommand per experiment kind; each takes the same flags and
/// insists that the config file declares the matching `kind`.
#[derive(Subcommand)]
#[command(rename_all = "snake_case")]
enum Command {
    /// Empirical boundary curve vs. its limit as N grows
    BoundaryConvergence(RunArgs),
    /// Per-class empirical tails vs. the closed-form limit on a (y, t) grid
    TailConvergence(RunArgs),
    /// Sup-norm deviation of the boundary over a dense time grid
    SupNormSweep(RunArgs),
    /// Finite-difference residuals of the limit PDE at h and h/2
    PdeResidual(RunArgs),
    /// Time-changed boundary vs. its profile-free limit, with ranking curves
    Timechange(RunArgs),
    /// Pareto-exponent recovery from (S, x) records
    Fit(RunArgs),
}

impl Command {
    fn split(&self) -> (ExperimentKind, &RunArgs) {
        match self {
            Command::BoundaryConvergence(a) => (ExperimentKind::BoundaryConvergence, a),
            Command::TailConvergence(a) => (ExperimentKind::TailConvergence, a),
            Command::SupNormSweep(a) => (ExperimentKind::SupNormSweep, a),
            Command::PdeResidual(a) => (ExperimentKind::PdeResidual, a),
            Command::Timechange(a) => (ExperimentKind::Timechange, a),
            Command::Fit(a) => (ExperimentKind::Fit, a),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's out_dir; default "out")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated replica seeds (overrides the config's seeds)
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();

    let mut config = ExperimentConfig::load(&args.config)?;
    if config.kind != kind {
        bail!(
            "config {} declares kind `{}` but the `{kind}` subcommand was invoked",
            args.config.display(),
            config.kind,
        );
    }
    if let Some(seeds) = &args.seeds {
        config.seeds = seeds.clone();
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let summary = match args.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .context("cannot build worker pool")?
            .install(|| run_experiment(&config, &out_dir))?,
        None => run_experiment(&config, &out_dir)?,
    };
    let path = summary.write(&out_dir)?;

    println!("kind,n,metric,value");
    for row in summary.rows() {
        println!("{row}");
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}
