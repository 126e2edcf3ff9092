//! File formats and subcommands of the `tannaka` command-line tool.

pub mod commands;
pub mod error;
pub mod format;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
