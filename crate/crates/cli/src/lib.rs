//! Library side of the `optosqueeze` binary: config loading, CSV I/O and the
//! subcommands, each of which returns its output as a string.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use commands::{Axis, AxisRange, Format};
pub use config::RunConfig;
pub use error::CliError;
