//! Experiment plumbing behind the `orbgrand` binary.

pub mod config;
pub mod output;
pub mod sweep;
pub mod trace;

pub use config::{ExperimentConfig, Format};
pub use output::emit_results;
pub use sweep::{run_sweep, SweepRow};
