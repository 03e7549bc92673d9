//! Command-line front end for the global-local mixture sampler: TOML
//! configuration, CSV input and output, and the `fit`, `simulate`, `compare`
//! and `diagnose` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use config::{DataSource, Overrides, RunConfig};
pub use error::{CliError, Result};
