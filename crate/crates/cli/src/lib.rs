//! File formats and workflows behind the `numoment` command-line tool.

pub mod commands;
pub mod error;
pub mod formats;

pub use error::{CliError, CliResult};
