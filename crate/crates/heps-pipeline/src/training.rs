//! Surrogate model training on the swept dataset.
//!
//! Two boosted-tree regressors are fit on the feasible rows: one for total
//! loss, one for the soft-switched device count. Both consume the same
//! feature vector; its layout is frozen here and shared by everything that
//! queries the models.

use dab_converter::Strategy;
use gbrt::{fit, r_squared, rmse, split_dataset, BoostedEnsemble, Sample, N_FEATURES};

use crate::config::PipelineConfig;
use crate::error::{PipelineError, Result};
use crate::seeds::derive_seed;
use crate::sweep::DatasetRow;

/// Feature layout shared by training and prediction.
pub fn features(strategy: Strategy, p: f64, v2: f64, d_inner: f64) -> [f64; N_FEATURES] {
    [strategy.code() as f64, p, v2, d_inner]
}

/// Distinguishes the two training targets when deriving split seeds.
const LOSS_TASK: u64 = 1;
const ZVS_TASK: u64 = 2;

/// The pair of fitted surrogates.
#[derive(Debug, Clone, PartialEq)]
pub struct Surrogates {
    pub loss: BoostedEnsemble,
    pub zvs: BoostedEnsemble,
}

impl Surrogates {
    pub fn predict_loss(&self, strategy: Strategy, p: f64, v2: f64, d_inner: f64) -> f64 {
        self.loss.predict(&features(strategy, p, v2, d_inner))
    }

    /// Raw regression output; not rounded or clamped.
    pub fn predict_n_zvs(&self, strategy: Strategy, p: f64, v2: f64, d_inner: f64) -> f64 {
        self.zvs.predict(&features(strategy, p, v2, d_inner))
    }
}

/// Held-out quality of a surrogate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub n_feasible: usize,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub loss_trees: usize,
    pub zvs_trees: usize,
    /// Coefficient of determination of the loss model on the test split.
    pub loss_r2: f64,
    /// Rmse of the loss model on the test split (W).
    pub loss_rmse: f64,
    /// Fraction of test rows whose rounded, clamped device-count prediction
    /// matches the true count exactly.
    pub zvs_accuracy: f64,
}

fn loss_sample(row: &DatasetRow) -> Sample {
    Sample {
        features: features(row.strategy, row.p, row.v2, row.d_inner),
        target: row.p_loss,
    }
}

fn zvs_sample(row: &DatasetRow) -> Sample {
    Sample {
        features: features(row.strategy, row.p, row.v2, row.d_inner),
        target: row.n_zvs as f64,
    }
}

/// Round a raw device-count prediction onto the valid 0 ..= 8 range.
pub fn round_n_zvs(raw: f64) -> u8 {
    raw.round().clamp(0.0, 8.0) as u8
}

/// Fit both surrogates on the feasible rows of a dataset. Infeasible rows
/// carry no waveform outputs and are excluded; feasibility itself is cheap
/// to decide exactly, so the models never need to learn it.
pub fn train_surrogates(
    rows: &[DatasetRow],
    cfg: &PipelineConfig,
) -> Result<(Surrogates, TrainReport)> {
    let feasible: Vec<&DatasetRow> = rows.iter().filter(|r| r.feasible).collect();
    if feasible.len() < 100 {
        return Err(PipelineError::Config(format!(
            "dataset has only {} feasible rows; need at least 100 to train",
            feasible.len()
        )));
    }

    let loss_samples: Vec<Sample> = feasible.iter().map(|r| loss_sample(r)).collect();
    let zvs_samples: Vec<Sample> = feasible.iter().map(|r| zvs_sample(r)).collect();

    let (ltrain, lval, ltest) =
        split_dataset(&loss_samples, derive_seed(cfg.seed, &[LOSS_TASK]));
    let (ztrain, zval, ztest) = split_dataset(&zvs_samples, derive_seed(cfg.seed, &[ZVS_TASK]));

    let loss = fit(&ltrain, &lval, &cfg.loss_model)?;
    let zvs = fit(&ztrain, &zval, &cfg.zvs_model)?;

    let lpred = loss.predict_batch(&ltest);
    let ltargets: Vec<f64> = ltest.iter().map(|s| s.target).collect();

    let hits = ztest
        .iter()
        .filter(|s| round_n_zvs(zvs.predict(&s.features)) == s.target as u8)
        .count();

    let report = TrainReport {
        n_feasible: feasible.len(),
        n_train: ltrain.len(),
        n_val: lval.len(),
        n_test: ltest.len(),
        loss_trees: loss.trees.len(),
        zvs_trees: zvs.trees.len(),
        loss_r2: r_squared(&lpred, &ltargets),
        loss_rmse: rmse(&lpred, &ltargets),
        zvs_accuracy: hits as f64 / ztest.len() as f64,
    };

    Ok((Surrogates { loss, zvs }, report))
}
