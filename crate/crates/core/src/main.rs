use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pppconc::harness::{self, Experiment, ExperimentConfig};
use pppconc::Error;

/// Poisson point process simulation, concentration bounds and adaptive intensity estimation.
#[derive(Parser)]
#[command(name = "pppconc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured worker count.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw point patterns.
    Simulate(Common),
    /// Empirical and true Fourier coefficients.
    Coeffs(Common),
    /// Projection estimate at a fixed or oracle dimension.
    Estimate(Common),
    /// Penalized model selection on one sample.
    Adapt(Common),
    /// Oracle and adaptive MISE over an n grid.
    Risk(Common),
    /// Monte-Carlo tails of the supremum against the bounds.
    Conc(Common),
    /// Bound values only, no simulation.
    BoundsTable(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (exp, common) = match cli.command {
        Command::Simulate(c) => (Experiment::Simulate, c),
        Command::Coeffs(c) => (Experiment::Coeffs, c),
        Command::Estimate(c) => (Experiment::Estimate, c),
        Command::Adapt(c) => (Experiment::Adapt, c),
        Command::Risk(c) => (Experiment::Risk, c),
        Command::Conc(c) => (Experiment::Conc, c),
        Command::BoundsTable(c) => (Experiment::BoundsTable, c),
    };
    let result = (|| -> Result<harness::RunOutcome, Error> {
        let mut cfg = match ExperimentConfig::load(&common.config) {
            Err(Error::Io(e)) => return Err(Error::Config(format!("cannot read {}: {e}", common.config.display()))),
            other => other?,
        };
        harness::apply_overrides(&mut cfg, exp, common.seed, common.threads, common.out)?;
        harness::run(&cfg)
    })();
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
