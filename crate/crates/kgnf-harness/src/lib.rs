//! Experiment harness for the `kgnf` toolkit: configuration, the experiment
//! registry and CSV/manifest output.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod split;

pub use config::{ExperimentConfig, PRESETS};
pub use error::{HarnessError, Result};
pub use experiments::{compute, run_experiment, EXPERIMENTS};
