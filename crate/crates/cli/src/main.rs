use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use levywalk_cli::commands;
use levywalk_cli::error::{CliError, EXIT_OK};
use levywalk_cli::{Overrides, RunConfig};

/// Monte Carlo simulation of Lévy walks and their scaling limits.
#[derive(Parser)]
#[command(name = "levywalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate LW, OLW, GLW or GOLW ensembles.
    Simulate(RunArgs),
    /// Simulate limit ensembles under a wait-first or jump-first scenario.
    Limit(RunArgs),
    /// Run a verification suite and write its JSON report.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Suite name; overrides `verify.suite` in the config.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Merge run manifests and their outputs into plot-ready CSV tables.
    Report {
        /// Output directory for the merged tables.
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Run manifests to merge.
        manifests: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long, env = "LEVYWALK_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "LEVYWALK_THREADS")]
    threads: Option<usize>,
    /// Ensemble size.
    #[arg(long)]
    paths: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self, suite: Option<String>) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            seed: self.seed,
            threads: self.threads,
            paths: self.paths,
            out: self.out.clone(),
            suite,
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => {
            let (path, _) = commands::simulate(&a.load(None)?)?;
            println!("wrote {}", path.display());
        }
        Command::Limit(a) => {
            let (path, _) = commands::limit(&a.load(None)?)?;
            println!("wrote {}", path.display());
        }
        Command::Verify { run, suite } => {
            let (path, _, report) = commands::verify(&run.load(suite)?)?;
            for r in &report.records {
                let status = if r.pass { "PASS" } else { "FAIL" };
                let point: Vec<String> = r.point.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!(
                    "{status} {} [{}] {}",
                    r.model,
                    point.join(", "),
                    r.note.as_deref().unwrap_or("")
                );
            }
            println!("wrote {}", path.display());
            if !report.passed {
                return Err(CliError::Verification {
                    failed: report.failures(),
                    total: report.records.len(),
                });
            }
        }
        Command::Report { out, manifests } => {
            let (path, _) = commands::report(&manifests, &out)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
