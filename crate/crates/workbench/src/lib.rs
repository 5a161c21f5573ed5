//! Std side of the workbench: shipped fixture graphs, graph and record file
//! formats, the experiment runner and summary tables behind the `sha` CLI.

pub mod config;
pub mod experiment;
pub mod fixtures;
pub mod graph_io;
pub mod store;
pub mod summary;

pub use config::{ExperimentConfig, InstanceSpec};
pub use experiment::{run_experiment, ExperimentOutcome};
pub use fixtures::Fixture;
