//! Experiment configuration, commands and output artifacts.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run_command, Command, ResultRecord};
pub use config::ExperimentConfig;
pub use output::Artifact;
