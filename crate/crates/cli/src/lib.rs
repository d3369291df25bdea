//! Command-line front end for `phibnorm`: configuration, subcommands and
//! JSON-lines reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod matrix;
pub mod report;

pub use commands::{run_command, Command};
pub use config::{Overrides, RunConfig};
pub use error::CliError;
pub use report::{ReportRecord, Run, Verdict};
