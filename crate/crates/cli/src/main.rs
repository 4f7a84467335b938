use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tdscatter_cli::{CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "tdscatter", version, about = "Photodetection intensities of modulated and moving dielectrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario sweep and write the results table and manifest.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Summarize a results table.
    Report {
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Check every row against the hash of this config.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out, threads, seed } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if seed.is_some() {
                cfg.seed = seed;
            }
            if threads == Some(0) {
                return Err(CliError::Config { field: "threads".into(), reason: "must be at least 1".into() });
            }
            let scenario = cfg.validate()?;
            let manifest = tdscatter_cli::run(&scenario, &out, threads)?;
            eprintln!(
                "{} points, {} evaluations, {:.2} s -> {}",
                manifest.points.len(),
                manifest.evals_total,
                manifest.wall_clock_seconds,
                out.join(&manifest.results_file).display()
            );
            Ok(())
        }
        Command::Report { results, out, config } => {
            let hash = config.map(|p| ScenarioConfig::load(&p).map(|c| c.hash())).transpose()?;
            let summary = tdscatter_cli::report(&results, &out, hash.as_deref())?;
            eprintln!("{} rows summarized -> {}", summary.rows, out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
