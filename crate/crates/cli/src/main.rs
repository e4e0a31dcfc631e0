use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bing_cli::{execute, parse_settings, Subcommand};
use clap::Parser;

/// Experiments on the folded-path model of shrinking Bing's decomposition.
#[derive(Parser, Debug)]
#[command(name = "bing", version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Config file (`key = value` lines with optional sections).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the emitted files.
    #[arg(long)]
    out: PathBuf,
    /// Override a config key, e.g. `--set seed=3` or `--set scale.target=0.25`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::fs::read_to_string(&cli.config)
        .with_context(|| format!("reading {}", cli.config.display()))
        .and_then(|text| {
            parse_settings(&text, &cli.overrides).with_context(|| format!("in {}", cli.config.display()))
        })
        .and_then(|settings| execute(cli.subcommand, &settings, &cli.out));
    match result {
        Ok(outcome) => {
            for m in &outcome.messages {
                println!("{m}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
