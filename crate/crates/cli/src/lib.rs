//! Command implementations behind the `discatt` binary.

pub mod commands;
pub mod config;
pub mod error;

pub use config::{Overrides, RunConfig};
pub use error::CliError;
