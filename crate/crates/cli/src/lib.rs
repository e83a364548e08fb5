//! Command-line harness around `lindtop`: run files, parameter sweeps,
//! figure presets and atomic CSV/JSON output with a manifest per run.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod params;
pub mod presets;
pub mod sweep;

pub use commands::run;
pub use error::{CliError, Result};
