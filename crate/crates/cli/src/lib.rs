//! Command-line front end for the retweet-network analysis pipeline.

pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod provenance;
pub mod synth;
pub mod tables;

pub use config::{PipelineConfig, ScorerKind};
pub use error::{CliError, Result};
pub use pipeline::{run_pipeline, RunOutcome};
