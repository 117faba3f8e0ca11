//! Config-driven experiment runner for Thompson sampling with Gaussian-process priors.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

pub use config::{parse_config, ExperimentConfig};
pub use error::CliError;
