use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::graph::{Dataset, SplitPart};
use crate::error::{Error, Result};

/// Assigns every graph to train/val/test under a seeded permutation.
///
/// Val and test sizes are `floor(fraction * n)`; the remainder goes to train.
pub fn split_dataset(ds: Dataset, fractions: (f64, f64, f64), seed: u64) -> Result<Dataset> {
    let (tr, va, te) = fractions;
    if [tr, va, te].iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        return Err(Error::Argument(format!(
            "split fractions must be positive, got ({tr}, {va}, {te})"
        )));
    }
    if (tr + va + te - 1.0).abs() > 1e-9 {
        return Err(Error::Argument(format!(
            "split fractions must sum to 1, got {}",
            tr + va + te
        )));
    }

    let n = ds.len();
    let n_val = (va * n as f64 + 1e-9).floor() as usize;
    let n_test = (te * n as f64 + 1e-9).floor() as usize;
    let n_train = n - n_val - n_test;

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut split = vec![SplitPart::Train; n];
    for (rank, &g) in order.iter().enumerate() {
        split[g] = if rank < n_train {
            SplitPart::Train
        } else if rank < n_train + n_val {
            SplitPart::Val
        } else {
            SplitPart::Test
        };
    }
    ds.with_split(split)
}
