//! File formats, wall-clock timing and the command-line harness around
//! `sgevp-core`.

pub mod cli;
pub mod error;
pub mod io;
pub mod report;
pub mod run;

pub use error::{CliError, CliResult};
