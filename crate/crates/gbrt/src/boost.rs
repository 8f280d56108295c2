//! Gradient boosting for squared-error regression.
//!
//! The model is base + sum of trees, each tree fit to the current
//! residuals with the learning rate folded into its stored leaf values.
//! After every round the validation rmse decides early stopping: when it
//! has not improved for `early_stopping_rounds` rounds, training stops and
//! the ensemble is cut back to the prefix that scored best. The empty
//! prefix (base prediction alone) takes part in that comparison.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Sample, N_FEATURES};
use crate::error::{GbrtError, Result};
use crate::metrics::rmse;
use crate::tree::{grow_tree, RegressionTree, TreeParams};

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Upper bound on boosting rounds.
    pub max_trees: usize,
    /// Shrinkage applied to every tree's contribution.
    pub learning_rate: f64,
    /// Depth limit per tree.
    pub max_depth: usize,
    /// L2 regularization on leaf values.
    pub lambda: f64,
    /// Minimum samples per leaf.
    pub min_samples_leaf: usize,
    /// Stop after this many rounds without validation improvement.
    pub early_stopping_rounds: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_trees: 2000,
            learning_rate: 0.08,
            max_depth: 9,
            lambda: 0.1,
            min_samples_leaf: 1,
            early_stopping_rounds: 50,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_trees == 0 {
            return Err(GbrtError::InvalidConfig {
                field: "max_trees",
                reason: "must be at least 1",
            });
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(GbrtError::InvalidConfig {
                field: "learning_rate",
                reason: "must lie in (0, 1]",
            });
        }
        if self.max_depth == 0 {
            return Err(GbrtError::InvalidConfig {
                field: "max_depth",
                reason: "must be at least 1",
            });
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(GbrtError::InvalidConfig {
                field: "lambda",
                reason: "must be finite and non-negative",
            });
        }
        if self.min_samples_leaf == 0 {
            return Err(GbrtError::InvalidConfig {
                field: "min_samples_leaf",
                reason: "must be at least 1",
            });
        }
        if self.early_stopping_rounds == 0 {
            return Err(GbrtError::InvalidConfig {
                field: "early_stopping_rounds",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// Trained boosted ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedEnsemble {
    /// Mean training target, the round-zero prediction.
    pub base: f64,
    /// Trees with leaf values already scaled by the learning rate.
    pub trees: Vec<RegressionTree>,
    /// Config the model was trained with.
    pub config: TrainConfig,
    /// Validation rmse of the kept prefix.
    pub val_rmse: f64,
}

impl BoostedEnsemble {
    pub fn predict(&self, features: &[f64; N_FEATURES]) -> f64 {
        let mut acc = self.base;
        for tree in &self.trees {
            acc += tree.predict(features);
        }
        acc
    }

    pub fn predict_batch(&self, samples: &[Sample]) -> Vec<f64> {
        samples.iter().map(|s| self.predict(&s.features)).collect()
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        serde_json::to_writer(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }
}

/// Total order on samples used to canonicalize dataset order before
/// training. Splitting is already insensitive to row order up to rounding,
/// but rounding alone can flip exactly tied split candidates; fixing a
/// canonical order makes the fit bitwise invariant to input permutation.
fn canonical_order(a: &Sample, b: &Sample) -> std::cmp::Ordering {
    for j in 0..N_FEATURES {
        match a.features[j].total_cmp(&b.features[j]) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.target.total_cmp(&b.target)
}

/// Fit an ensemble on `train`, early-stopping against `val`.
pub fn fit(train: &[Sample], val: &[Sample], config: &TrainConfig) -> Result<BoostedEnsemble> {
    config.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(GbrtError::EmptyDataset);
    }
    let mut train: Vec<Sample> = train.to_vec();
    train.sort_by(canonical_order);
    let train = &train[..];
    let mut val: Vec<Sample> = val.to_vec();
    val.sort_by(canonical_order);
    let val = &val[..];

    let base = train.iter().map(|s| s.target).sum::<f64>() / train.len() as f64;
    let params = TreeParams {
        max_depth: config.max_depth,
        lambda: config.lambda,
        min_samples_leaf: config.min_samples_leaf,
    };

    let val_targets: Vec<f64> = val.iter().map(|s| s.target).collect();
    let mut val_pred = vec![base; val.len()];
    let mut train_pred = vec![base; train.len()];
    let mut residuals: Vec<f64> = train.iter().map(|s| s.target - base).collect();

    let mut trees: Vec<RegressionTree> = Vec::new();
    let mut best_rmse = rmse(&val_pred, &val_targets);
    let mut best_len = 0usize;

    for round in 0..config.max_trees {
        let mut tree = grow_tree(train, &residuals, &params);
        tree.scale_leaves(config.learning_rate);

        for (pred, sample) in train_pred.iter_mut().zip(train) {
            *pred += tree.predict(&sample.features);
        }
        for (res, (pred, sample)) in residuals.iter_mut().zip(train_pred.iter().zip(train)) {
            *res = sample.target - *pred;
        }
        for (pred, sample) in val_pred.iter_mut().zip(val) {
            *pred += tree.predict(&sample.features);
        }
        trees.push(tree);

        let score = rmse(&val_pred, &val_targets);
        if score < best_rmse {
            best_rmse = score;
            best_len = trees.len();
        } else if trees.len() - best_len >= config.early_stopping_rounds {
            break;
        }
        let _ = round;
    }

    trees.truncate(best_len);
    Ok(BoostedEnsemble {
        base,
        trees,
        config: *config,
        val_rmse: best_rmse,
    })
}
