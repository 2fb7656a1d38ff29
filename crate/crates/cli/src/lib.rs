//! Scenario-driven front end for `robust-fusion`: scenario files, the
//! subcommand drivers and their error mapping.

pub mod commands;
pub mod error;
pub mod scenario;
