//! Experiment harness behind the `tlbounds` command-line tool.

pub mod compare;
pub mod config;
pub mod coverage;
pub mod experiment;
pub mod output;
pub mod stability;

pub use compare::{compare_multisource, ComparisonReport};
pub use config::ExperimentConfig;
pub use coverage::{verify_bound, CoverageReport};
pub use experiment::Experiment;
pub use output::{run_command, Command, HarnessError, OutputFormat, Overrides, RunOutput};
pub use stability::{stability_grid, StabilityReport};
