//! Stratified k-fold planning.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Assignment of every sample id to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, sample_id: &str) -> Option<usize> {
        self.assignment.get(sample_id).copied()
    }

    /// Sample ids of fold `f`, sorted.
    pub fn fold_members(&self, f: usize) -> Vec<&str> {
        self.assignment
            .iter()
            .filter(|(_, &v)| v == f)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.assignment.values() {
            sizes[f] += 1;
        }
        sizes
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fold plan serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let plan: FoldPlan = serde_json::from_str(text)
            .map_err(|e| Error::format("folds.json", e.line(), e.to_string()))?;
        if plan.k < 2 || plan.assignment.values().any(|&f| f >= plan.k) {
            return Err(Error::format("folds.json", 0, "fold index out of range"));
        }
        Ok(plan)
    }
}

/// Stratified, seeded fold assignment.
///
/// Each class is shuffled with its own keyed stream and dealt round-robin;
/// the dealing position carries over from one class to the next, so both
/// per-class and total fold sizes differ by at most one. Classes smaller than
/// `k` simply spill over into the next folds.
pub fn make_folds(ds: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("fold count must be >= 2, got {k}")));
    }
    if k > ds.len() {
        return Err(Error::InvalidInput(format!(
            "fold count {k} exceeds the {} available samples",
            ds.len()
        )));
    }
    let mut assignment = BTreeMap::new();
    let mut position = 0usize;
    for class in ds.class_names() {
        let mut members: Vec<&str> = ds
            .samples()
            .iter()
            .filter(|s| &s.label == class)
            .map(|s| s.id.as_str())
            .collect();
        let mut r = rng::stream(seed, class, 0, "folds");
        members.shuffle(&mut r);
        for id in members {
            assignment.insert(id.to_string(), position % k);
            position += 1;
        }
    }
    Ok(FoldPlan { k, seed, assignment })
}
