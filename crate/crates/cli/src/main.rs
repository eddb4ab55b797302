use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod experiments;
mod report;

use experiments::RunError;

#[derive(Parser)]
#[command(name = "triangulab", version, about = "Numerical laboratory for triangular operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the registered experiments.
    List,
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for e in &experiments::REGISTRY {
                println!("{:<18} {}", e.name, e.description);
            }
            ExitCode::SUCCESS
        }
        Command::Run { config } => run(&config),
    }
}

fn run(path: &std::path::Path) -> ExitCode {
    let cfg = match config::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let experiment = experiments::find(&cfg.experiment).expect("validated by config::load");
    let mut report = match report::Report::new(&cfg.output_dir) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cfg.output_dir.display());
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    if let Err(e) = experiment.run(&cfg, &mut report) {
        eprintln!("error: {e}");
        return ExitCode::from(match e {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerical(_) | RunError::Io(_) => EXIT_NUMERICAL,
        });
    }
    let summary = match report.finish(&cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot write summary: {e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    for c in &report.checks {
        println!("{} {}: {} (threshold {})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    println!("summary: {}", summary.display());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
