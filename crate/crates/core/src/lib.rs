//! Feedforward neural networks trained by the FOX metaheuristic.
//!
//! The crate has one module per stage of the pipeline:
//!
//! - [`fox`]: the population-based FOX optimizer over a box-bounded space;
//! - [`mlp`]: sigmoid feedforward networks and their flat weight layout;
//! - [`trainers`]: FOXANN, backpropagation and logistic-regression trainers;
//! - [`data`]: bundled datasets, CSV loading, min-max scaling, stratified folds;
//! - [`metrics`]: confusion matrices and macro precision/recall/F-score;
//! - [`harness`]: cross-validated experiments and report export;
//! - [`cli`]: the `foxann` command-line tool.
//!
//! ```no_run
//! use foxann::harness::{run_experiment, ExperimentConfig};
//!
//! let result = run_experiment(&ExperimentConfig::default()).unwrap();
//! print!("{}", foxann::harness::render_table(&result));
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod fox;
pub mod harness;
pub mod metrics;
pub mod mlp;
pub mod seed;
pub mod trainers;

pub use error::{Error, Result};
