//! Config-driven runner for `hjadm-core`: loads a TOML problem description,
//! runs one pipeline stage, and writes CSV or JSON tables plus a
//! `manifest.json` describing them.

pub mod config;
pub mod manifest;
pub mod output;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, Format, RunConfig};
pub use manifest::{ErrorClass, Manifest, Status};
pub use run::{run, Subcommand};
