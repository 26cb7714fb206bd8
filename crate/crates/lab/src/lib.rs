//! Configuration, file formats, experiment orchestration and the acceptance
//! suite around `bergman-core`.

pub mod config;
pub mod io;
pub mod run;
pub mod verify;

pub use config::{ConfigError, RunConfig};
pub use run::{run, RunError, RunSummary, Subcommand};
