//! Front end for the sg-router engine: configuration loading and the
//! subcommand implementations behind the `sg-router` binary.

pub mod commands;
pub mod config;
