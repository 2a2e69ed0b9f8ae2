//! The `zigcast` command-line pipeline: configuration, run directories and
//! subcommands wiring the core modules end to end.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod lock;
pub mod manifest;
pub mod pipeline;

pub use error::{CliError, CliResult};
