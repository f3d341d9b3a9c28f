//! Monte Carlo harness for the LCS of Mallows permutations.
//!
//! Experiments are embarrassingly parallel over replicas. Replica `r` always
//! draws from `RngStream::new(seed, r)` and results are gathered in replica
//! order, so every output is bit-identical for any number of workers.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod runner;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{SimError, SimResult};
pub use experiments::{
    run_clt, run_experiment, run_finite_beta, run_renewal, run_stationary, run_weak_law,
    ExperimentReport,
};
pub use output::{emit, OutputFormat};
pub use stats::{ks_statistic, SummaryStats};
