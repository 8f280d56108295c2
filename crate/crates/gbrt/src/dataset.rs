//! Sample container and the deterministic train/validation/test split.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Number of input features per sample.
pub const N_FEATURES: usize = 4;

/// One training sample: fixed-width feature vector and scalar target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: [f64; N_FEATURES],
    pub target: f64,
}

/// Shuffle with a seeded generator and split 70% / 15% / 15% into train,
/// validation and test sets. Sizes are floor(0.7 n) and floor(0.15 n) with
/// the remainder going to the test set, so every sample lands in exactly
/// one part.
pub fn split_dataset(samples: &[Sample], seed: u64) -> (Vec<Sample>, Vec<Sample>, Vec<Sample>) {
    let mut shuffled: Vec<Sample> = samples.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);

    let n = shuffled.len();
    let n_train = (0.7 * n as f64).floor() as usize;
    let n_val = (0.15 * n as f64).floor() as usize;
    let test = shuffled.split_off(n_train + n_val);
    let val = shuffled.split_off(n_train);
    (shuffled, val, test)
}
