//! Library half of the `hjc` command-line tool: configuration schema,
//! experiment drivers and provenance output.

pub mod config;
pub mod output;
pub mod run;

pub use run::{run, CliError, Overrides, Subcommand};
