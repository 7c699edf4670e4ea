//! Command-line front end: configuration, dispatch to the simulation
//! experiments, result files and reference-table regeneration.

pub mod config;
pub mod fixtures;
pub mod output;
pub mod run;

pub use config::{build_config, parse_kv, ConfigError, Experiment, ExperimentConfig};
pub use run::{dispatch, RunManifest, RunOutput};
