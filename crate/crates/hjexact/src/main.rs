use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use hjexact::cli;

/// Exact Schrödinger solutions from harmonic actions: residual checks,
/// packet propagation cross-checks, and field tables, driven by one JSON
/// config.
#[derive(Parser)]
#[command(name = "hjx", version, about, max_term_width = 100)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the jobs in a config file and write reports to a directory.
    Run {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Only run jobs whose name contains this substring.
        #[arg(long)]
        jobs: Option<String>,
        /// Concurrent job workers; results are collected in config order
        /// either way.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// List the action families, their parameters, potentials, and
    /// conserved operators.
    Families,
    /// Print the tool version.
    Version,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    let args = Args::parse();
    match args.command {
        Command::Run {
            config,
            out,
            jobs,
            workers,
        } => {
            let parsed = cli::parse_config(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let summary = cli::run(&parsed, &out, jobs.as_deref(), workers)
                .with_context(|| format!("running jobs into {}", out.display()))?;
            println!("pass: {}  fail: {}", summary.pass, summary.fail);
            Ok(ExitCode::from(
                u8::try_from(summary.exit_code()).unwrap_or(1),
            ))
        }
        Command::Families => {
            print!("{}", cli::list_families());
            Ok(ExitCode::SUCCESS)
        }
        Command::Version => {
            println!("{}", cli::version_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}
