use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmcis_cli::{run, Command, ExperimentConfig, VectorCache};

#[derive(Parser)]
#[command(name = "qmcis", version, about = "Randomized lattice rules with importance sampling")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Primary output file; stdout when omitted (convergence requires it).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Build a generating vector by CBC.
    Cbc,
    /// Estimate the integral at a single N for every configured method.
    Estimate,
    /// RMSE over the N grid with log-log fits.
    Convergence,
    /// Compare Fourier coefficients of the kernel against their bound.
    FourierCheck,
    /// Report the growth, eigenvalue and model conditions.
    Assumptions,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Cbc => Command::Cbc,
            Cmd::Estimate => Command::Estimate,
            Cmd::Convergence => Command::Convergence,
            Cmd::FourierCheck => Command::FourierCheck,
            Cmd::Assumptions => Command::Assumptions,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    };
    let result = cfg.and_then(|mut cfg| {
        if let Some(s) = cli.seed {
            cfg.seed = s;
        }
        run(cli.command.into(), &cfg, cli.out.as_deref(), &VectorCache::from_env())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmcis: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
