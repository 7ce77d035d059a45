//! Command-line front end for the pitshot planner: run configuration,
//! subcommands and byte-stable CSV emission.

pub mod commands;
pub mod config;
pub mod csv;

pub use commands::{cmd_figures, cmd_montecarlo, cmd_plan, cmd_simulate, cmd_sweep, Failure, Output};
pub use config::{load_config, parse_config, RunConfig};
