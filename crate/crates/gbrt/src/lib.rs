//! Gradient-boosted regression trees with exact greedy split search.
//!
//! Self-contained: dataset splitting, tree growth, boosting with early
//! stopping, metrics and JSON model persistence.

pub mod boost;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod tree;

pub use boost::{fit, BoostedEnsemble, TrainConfig};
pub use dataset::{split_dataset, Sample, N_FEATURES};
pub use error::{GbrtError, Result};
pub use metrics::{mae, r_squared, rmse};
pub use tree::{Node, RegressionTree};
