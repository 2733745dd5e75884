//! Experiment harness for `travwave-core`: TOML configs, experiment runners,
//! parameter sweeps, CSV/JSON/SVG outputs and the `travwave` CLI.

// `!(a < b)` comparisons are how NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod plot;
pub mod setup;
pub mod sweep;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{LabError, Result};
pub use experiment::{execute, run_experiment, Details, Experiment, RunSummary, Status, TerminationKind};
pub use sweep::{run_sweep, SweepResult, SweepRow};
