//! Command-line front end for `snyder_core`.
//!
//! Each subcommand resolves its settings (flags, then the TOML config, then
//! defaults), runs one workflow from [`workflows`] and writes CSV artifacts
//! into the output directory. Exit status is 0 on success, 1 when a
//! computation fails and 2 for usage or configuration errors.

pub mod app;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;
pub mod workflows;

pub use error::{CliError, CliResult};
