//! Batch front-end for `eps-core`: scenario files, experiments and output
//! formats.

// `!(x > 0.0)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod io;

pub use config::{ConfigError, ExperimentName, ScenarioConfig};
pub use experiments::{run, RunOutcome};
