//! Scenario runner behind the `secondlaw-lab` binary.
//!
//! Exit codes: 0 success, 2 config validation, 3 computation, 4 I/O,
//! 5 config syntax, 6 unknown scenario, 7 missing key.

pub mod config;
pub mod scenario;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{parse_config, ConfigError, Scenario, ScenarioConfig, ScenarioKind};
pub use scenario::{execute, format_number, run_scenario, OTTO_COLUMNS, PROCESS_COLUMNS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_PARSE: i32 = 5;
pub const EXIT_UNKNOWN_SCENARIO: i32 = 6;
pub const EXIT_MISSING_KEY: i32 = 7;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{label}: {source}")]
    Compute {
        label: String,
        #[source]
        source: crate::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(e) => e.exit_code(),
            CliError::Compute { .. } => EXIT_COMPUTE,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

/// Reads and parses a config file, applying an optional step override.
pub fn load_config(path: &std::path::Path, steps_override: Option<usize>) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut config = parse_config(&text)?;
    if let Some(steps) = steps_override {
        if steps < 2 {
            return Err(CliError::Config(ConfigError::Override {
                flag: "--steps-override",
                message: format!("must be at least 2, got {steps}"),
            }));
        }
        for run in &mut config.runs {
            run.scenario.override_steps(steps);
        }
    }
    Ok(config)
}
