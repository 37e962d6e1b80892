//! Batch experiment runner: configuration, per-experiment report builders,
//! and the composed verification sweep behind `verify-all`.

pub mod acceptance;
pub mod config;
pub mod experiments;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, ExperimentKind};
pub use report::{Check, ExperimentReport};
pub use runner::run;
