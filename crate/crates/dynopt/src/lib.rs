//! File formats, experiment drivers and the command-line interface around
//! `dynopt-core`.
//!
//! * [`config`]: the TOML run configuration.
//! * [`files`]: suites, scenarios, checkpoints, CSV tables and manifests.
//! * [`experiment`]: training, evaluation, ablation and navigation runs.
//! * [`report`]: per-instance mean/std/rank tables.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod files;
pub mod records;
pub mod report;

pub use config::RunConfig;
pub use error::{HarnessError, Result};
