//! Command-line front end for the `isopar` library: Clifford system
//! construction, identity checks, curvature verdicts and the verdict table.

pub mod analysis;
pub mod cases;
pub mod commands;
pub mod config;
pub mod error;
pub mod verdicts;

pub use error::{CliError, CliResult};
