//! Library half of the `qubit-roof` command-line tool: input descriptors,
//! report generation and parameter sweeps.

pub mod commands;
pub mod error;
pub mod input;
pub mod report;
pub mod sweep;

pub use error::{CliError, ExitCode};
