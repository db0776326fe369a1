use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use cipa_cli::config::ExperimentConfig;
use cipa_cli::output::{plot_script, write_run};
use cipa_cli::{exit_code, run, Overrides};

#[derive(Parser)]
#[command(name = "cipa", version, about = "Inverse graph filtering experiments")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Polynomial degree M
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Iteration count m
    #[arg(long, global = true)]
    iters: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sup-norm errors of the Chebyshev series and interpolant of 1/h1
    Table1,
    /// Mean relative iteration errors of CPA, CIPA, OGDA and ARMA
    Table2,
    /// Error curves of CIPA and CPA for several degrees
    Convergence,
    /// Vertex-level CIPA against the centralized solver
    DistributedCheck,
    /// Tikhonov denoising sweep over the penalty grid
    DenoiseSweep,
    /// Graph utilities
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
}

#[derive(Subcommand)]
enum GraphAction {
    /// Write an edge list for the configured graph
    Gen,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Table1 => "table1",
            Command::Table2 => "table2",
            Command::Convergence => "convergence",
            Command::DistributedCheck => "distributed-check",
            Command::DenoiseSweep => "denoise-sweep",
            Command::Graph { action: GraphAction::Gen } => "graph-gen",
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.flags.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    Overrides {
        seed: cli.flags.seed,
        trials: cli.flags.trials,
        out: cli.flags.out.clone(),
        degree: cli.flags.degree,
        iters: cli.flags.iters,
    }
    .apply(&mut cfg);
    let experiment = cli.command.name();
    let result = run(experiment, &cfg)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let written = write_run(&cfg.out, experiment, &cfg, &result.files, plot_script(experiment))?;
    println!("{}", result.summary.trim_end());
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let category = err
                .chain()
                .find_map(|e| e.downcast_ref::<cipa_core::Error>())
                .map_or("other", |e| e.category());
            eprintln!("error[{category}]: {err:#}");
            ExitCode::from(exit_code(category) as u8)
        }
    }
}
