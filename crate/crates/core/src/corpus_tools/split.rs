//! Seeded train/test splits.
//!
//! The permutation is a Fisher-Yates shuffle driven by ChaCha20 seeded from
//! a `u64`, with bounded integers drawn by rejection sampling, so the same
//! seed gives the same split on every platform.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ALGORITHM: &str = "chacha20-seed_from_u64/fisher-yates-descending/rejection-u64";
pub const ROUNDING: &str = "train = min(ceil(ratio * n), n - 1), test = n - train";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    /// Training fraction.
    pub ratio: f64,
    pub n: usize,
    pub algorithm: String,
    pub rounding: String,
    /// Indices into the pair list, in export order.
    pub train_ids: Vec<usize>,
    pub test_ids: Vec<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("ratio {0} is outside (0, 1)")]
    Ratio(f64),
    #[error("need at least 2 pairs to split, got {0}")]
    TooFew(usize),
    #[error("manifest is for {manifest} pairs, got {actual}")]
    SizeMismatch { manifest: usize, actual: usize },
    #[error("manifest is not a partition of 0..{0}")]
    NotPartition(usize),
}

/// Uniform integer in `0..bound`.
fn below(rng: &mut ChaCha20Rng, bound: u64) -> u64 {
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = below(&mut rng, i as u64 + 1) as usize;
        order.swap(i, j);
    }
    order
}

pub fn train_size(n: usize, ratio: f64) -> usize {
    // The epsilon keeps exact products such as 0.9 * 10 from rounding up.
    ((ratio * n as f64 - 1e-9).ceil().max(1.0) as usize).min(n.saturating_sub(1))
}

/// Splits `n` pairs: a seeded permutation of `0..n`, the first
/// `ceil(ratio * n)` indices going to train. Both sides keep at least one pair.
pub fn split(n: usize, ratio: f64, seed: u64) -> Result<SplitManifest, SplitError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(SplitError::Ratio(ratio));
    }
    if n < 2 {
        return Err(SplitError::TooFew(n));
    }
    let order = permutation(n, seed);
    let k = train_size(n, ratio);
    Ok(SplitManifest {
        seed,
        ratio,
        n,
        algorithm: ALGORITHM.into(),
        rounding: ROUNDING.into(),
        train_ids: order[..k].to_vec(),
        test_ids: order[k..].to_vec(),
    })
}

impl SplitManifest {
    /// Verifies the manifest partitions `0..n`.
    pub fn check(&self, n: usize) -> Result<(), SplitError> {
        if self.n != n {
            return Err(SplitError::SizeMismatch { manifest: self.n, actual: n });
        }
        let mut seen = vec![false; n];
        for &i in self.train_ids.iter().chain(&self.test_ids) {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(SplitError::NotPartition(n));
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(SplitError::NotPartition(n))
        }
    }

    /// Recomputes the split from the recorded seed and ratio and compares.
    pub fn reproduces(&self) -> bool {
        split(self.n, self.ratio, self.seed).is_ok_and(|m| m == *self)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
