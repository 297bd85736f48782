//! Confusion counts and the Jaccard index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Per-pixel tally of `pred` against `gt`, lesion = `true`.
pub fn confusion(pred: &BinaryMask, gt: &BinaryMask) -> Result<ConfusionCounts> {
    gt.check_dims(pred.dims())?;
    let mut c = ConfusionCounts::default();
    for (&p, &g) in pred.pixels().iter().zip(gt.pixels()) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// `tp / (tp + fp + fn)`; 1.0 when both masks are empty.
pub fn jaccard(c: &ConfusionCounts) -> f64 {
    let union = c.tp + c.fp + c.fn_;
    if union == 0 {
        return 1.0;
    }
    c.tp as f64 / union as f64
}

pub fn mean_jaccard(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyList);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}
