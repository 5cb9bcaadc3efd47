//! Batch runner: reads a flat JSON experiment description, sweeps its grids
//! over the `mipt-core` engines and writes CSV tables plus a run manifest.

pub mod config;
pub mod experiments;
pub mod runner;
pub mod table;

pub use config::{Analysis, Engine, Experiment, ExperimentConfig, Grids, ProtocolSettings, VqaSettings};
pub use runner::{config_hash, parse_config, run_config, run_file, Manifest, RunError, RunOptions, RunReport, OUTPUT_ENV};
