//! Command-line front end for `pointspec`: configuration, run modes and
//! report serialization.

pub mod config;
pub mod report;
pub mod run;

use std::path::Path;

pub use config::{Interaction, Kind, Mode, Params, RunConfig, StateChoice};
pub use report::Report;
pub use run::run;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(pointspec::Error),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// The offending field for validation errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            Self::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid { .. } => EXIT_INVALID,
            Self::Numerical(_) | Self::Io { .. } => EXIT_NUMERICAL,
        }
    }
}

impl From<pointspec::Error> for CliError {
    fn from(e: pointspec::Error) -> Self {
        match e {
            pointspec::Error::Domain { name, value, reason } => Self::invalid(name, format!("{value}: {reason}")),
            other => Self::Numerical(other),
        }
    }
}

/// Loads the config file named in `flags` (if any) and lays the flags over it.
pub fn resolve(flags: Params) -> Result<RunConfig, CliError> {
    let merged = match &flags.config {
        Some(path) => {
            let file = Params::from_file(path)?;
            if file.config.is_some() {
                return Err(CliError::invalid("config", "config files cannot nest"));
            }
            flags.over(file)
        }
        None => flags,
    };
    RunConfig::validate(&merged)
}

/// Runs a configuration, writes its artifacts and returns the exit code.
pub fn execute(cfg: &RunConfig) -> i32 {
    let outcome = run(cfg).and_then(|(report, artifacts)| {
        artifacts.write()?;
        report.write(cfg.out.as_deref())?;
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            if failed.is_empty() {
                EXIT_OK
            } else if cfg.mode == Mode::Verify {
                eprintln!("verification failed: {}", failed.join(", "));
                EXIT_MISMATCH
            } else {
                for name in failed {
                    log::warn!("check {name} did not pass");
                }
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
