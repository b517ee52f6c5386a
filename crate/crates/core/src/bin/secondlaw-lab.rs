use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use secondlaw::cli::{load_config, run_scenario, CliError, EXIT_OK};

#[derive(Parser)]
#[command(name = "secondlaw-lab", version, about = "Run second-law bookkeeping scenarios and write CSV series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write its CSV output.
    Run {
        config: PathBuf,
        /// Directory the configured output paths are resolved against.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Replace the grid step count of every run.
        #[arg(long)]
        steps_override: Option<usize>,
    },
    /// Parse and validate a scenario config without running it.
    Validate { config: PathBuf },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out_dir,
            steps_override,
        } => {
            let config = load_config(&config, steps_override)?;
            for line in run_scenario(&config, &out_dir)? {
                println!("{line}");
            }
        }
        Command::Validate { config } => {
            let config = load_config(&config, None)?;
            println!("ok: {} ({} run(s))", config.scenario.name(), config.runs.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("secondlaw-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
