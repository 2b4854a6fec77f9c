use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hypemb::commands::{self, Command, Options};
use hypemb::config;

/// Verification harness for coned-off free products and the cochain
/// extension operator.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides window.radius.
    #[arg(long)]
    radius: Option<usize>,
    /// Overrides the degree of every family entry.
    #[arg(long)]
    degree: Option<usize>,
    /// Seed for sampled permutation checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Tuple file for trace and theta.
    #[arg(long)]
    input: Option<PathBuf>,
    /// CSV output for bbf-check.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let loaded = match config::read(&cli.config).and_then(|c| config::load(c, cli.radius, cli.degree)) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("invalid config: {e:#}");
            return ExitCode::from(2);
        }
    };
    let opts = Options { seed: cli.seed, jobs: cli.jobs, input: cli.input };
    let report = match commands::run(cli.command, &loaded, &opts) {
        Ok(r) => r,
        Err(e) if commands::is_config_error(&e) => {
            eprintln!("invalid config: {e:#}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let text = report.to_json();
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("writing report: {e}");
        return ExitCode::from(1);
    }
    if let (Some(path), Some(csv)) = (&cli.csv, &report.csv) {
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("writing csv: {e}");
            return ExitCode::from(1);
        }
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("{}: some checks failed, see the report", cli.command.name());
        ExitCode::from(1)
    }
}
