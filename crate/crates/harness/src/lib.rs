//! Experiment orchestration for `oneshot-core`: declarative grids, a
//! deterministic parallel runner and CSV output.
//!
//! Every cell `(objective, d, lambda, run)` owns a random stream derived from
//! the master seed and the cell coordinates, so output does not depend on the
//! number of worker threads.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod runner;

pub use config::{Experiment, ExperimentConfig, Method, OptimumLaw};
pub use error::{HarnessError, Result};
pub use experiments::{compare, hull_demo, rate_fit_experiment, sweep_ratio, WinMatrix};
pub use output::{aggregate, write_csv, RegretRecord, RunLabel};
pub use runner::{run_single, CellKey};
