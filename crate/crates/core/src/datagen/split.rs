use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::DataRecord;
use crate::seed::rng_from_seed;
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub shuffle_seed: u64,
}

impl SplitSpec {
    /// 8000 / 2000 / 2000.
    pub fn paper_default(shuffle_seed: u64) -> Self {
        Self {
            n_train: 8000,
            n_val: 2000,
            n_test: 2000,
            shuffle_seed,
        }
    }

    pub fn total(&self) -> usize {
        self.n_train + self.n_val + self.n_test
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Split<T> {
    pub train: Vec<DataRecord<T>>,
    pub val: Vec<DataRecord<T>>,
    pub test: Vec<DataRecord<T>>,
}

/// Seeded shuffle, then contiguous train / validation / test blocks.
pub fn split_dataset<T: Real>(records: &[DataRecord<T>], spec: &SplitSpec) -> Result<Split<T>> {
    if spec.total() > records.len() {
        return Err(Error::InvalidSplit {
            requested: spec.total(),
            available: records.len(),
        });
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.shuffle(&mut rng_from_seed(spec.shuffle_seed));
    let take = |range: std::ops::Range<usize>| -> Vec<DataRecord<T>> {
        order[range].iter().map(|&i| records[i].clone()).collect()
    };
    let a = spec.n_train;
    let b = a + spec.n_val;
    let c = b + spec.n_test;
    Ok(Split {
        train: take(0..a),
        val: take(a..b),
        test: take(b..c),
    })
}
