//! Experiment driver for the fractional Navier-Stokes lab: configuration parsing, deterministic
//! test families, the acceptance suites and report emission. The `qnslab` binary wraps
//! [`commands`].

pub mod commands;
pub mod config;
pub mod error;
pub mod family;
pub mod output;
pub mod suites;

pub use config::{ExperimentConfig, Format};
pub use error::{LabError, Result};
