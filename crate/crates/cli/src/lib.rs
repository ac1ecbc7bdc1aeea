//! Command-line front end for the `gvqkd` simulator: configuration loading,
//! the `transmit`, `fringe-scan` and `attack-demo` experiments, and report
//! emission.

pub mod commands;
pub mod config;
mod error;
pub mod report;

pub use commands::{cmd_attack_demo, cmd_fringe_scan, cmd_transmit};
pub use config::{load_config, parse_config, RunConfig};
pub use error::CliError;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ALARM: i32 = 3;
