//! Command-line driver for the `levywalk` engine: configuration, run
//! manifests, ensemble commands and verification suites.

pub mod commands;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod manifest;
pub mod suites;

pub use config::{ModelKind, Overrides, RunConfig};
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
pub use suites::SuiteReport;
