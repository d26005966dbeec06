//! Experiment runner for the biharmonic NLS laboratory: configuration,
//! scenario presets, persistence, and report emission.

pub mod checkpoint;
pub mod config;
pub mod presets;
pub mod report;
pub mod runner;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("config error: {0}")]
    Config(String),

    #[error("config validation failed at `{location}`: {message}")]
    Validation { location: String, message: String },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("io error: {0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] bnls_core::Error),
}
