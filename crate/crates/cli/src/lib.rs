//! Batch front-end for the `qmcis` experiments: generating vectors,
//! single estimates, convergence studies and bound checks.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod runner;

pub use cache::VectorCache;
pub use commands::{run, Command};
pub use config::{ExperimentConfig, Method, Sampler};
pub use error::CliError;
