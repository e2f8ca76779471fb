//! Command-line pipeline around the band-coefficient core and the cell
//! solvers: file formats, configuration and subcommand bodies.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use error::{CliError, Result, EXIT_INPUT, EXIT_INTERNAL, EXIT_OK, EXIT_TREND};
