//! Library side of the `simulate` binary: config resolution, commands and
//! output rendering.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{execute, write_artifacts, Artifact};
pub use config::{ConfigFile, EngineName, Format, Overrides, RunConfig, Subcommand};
pub use error::CliError;
