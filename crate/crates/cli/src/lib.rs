//! Configuration, orchestration and reporting for sweeps of the epigenetic
//! Boolean network experiments.

pub mod attractors;
pub mod compare;
pub mod config;
pub mod error;
pub mod experiment;
pub mod plot;

pub use config::{parse_config, ExperimentSpec, Point};
pub use error::{CliError, Result};
