//! Command-line experiments for generalized first-passage percolation:
//! configuration, parallel replicas, CSV output and reproducible run
//! manifests on top of `percofpp-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod parallel;
pub mod table;

pub use commands::{compute, replay, run, RunOptions, RunOutcome, SUBCOMMANDS};
pub use config::Settings;
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
pub use parallel::RayonReplicator;
