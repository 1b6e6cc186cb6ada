//! Score matrices, z-score normalization, sum-rule fusion and accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples x classes decision values with their orderings attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    ids: Vec<String>,
    classes: Vec<String>,
    values: Vec<f64>,
    /// Names of the members this matrix was built from.
    pub provenance: Vec<String>,
}

impl ScoreMatrix {
    pub fn new(ids: Vec<String>, classes: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != ids.len() * classes.len() {
            return Err(Error::Mismatch(format!(
                "{} values for {} samples x {} classes",
                values.len(),
                ids.len(),
                classes.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("score entry {i} is not finite")));
        }
        Ok(Self {
            ids,
            classes,
            values,
            provenance: Vec::new(),
        })
    }

    pub fn with_provenance(mut self, name: impl Into<String>) -> Self {
        self.provenance = vec![name.into()];
        self
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> usize {
        self.ids.len()
    }

    pub fn cols(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.classes.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let k = self.classes.len();
        &self.values[row * k..(row + 1) * k]
    }

    /// Applies `a x + b` to every entry.
    pub fn affine(&self, a: f64, b: f64) -> ScoreMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = a * *v + b);
        out
    }

    /// Z-score over all entries with the sample (n - 1) standard deviation.
    /// A constant matrix maps to zeros, and the flag is set.
    pub fn zscore(&self) -> (ScoreMatrix, bool) {
        let n = self.values.len();
        let mut out = self.clone();
        if n < 2 {
            out.values.iter_mut().for_each(|v| *v = 0.0);
            return (out, true);
        }
        let mean = fsum(self.values.iter().copied()) / n as f64;
        let ss = fsum(self.values.iter().map(|v| (v - mean) * (v - mean)));
        let sd = (ss / (n as f64 - 1.0)).sqrt();
        if !(sd > 0.0) || sd <= mean.abs() * 1e-15 {
            out.values.iter_mut().for_each(|v| *v = 0.0);
            return (out, true);
        }
        out.values.iter_mut().for_each(|v| *v = (*v - mean) / sd);
        (out, false)
    }

    /// Per-row argmax; ties go to the lowest class index.
    pub fn predict(&self) -> Vec<usize> {
        (0..self.rows())
            .map(|r| {
                let row = self.row(r);
                let mut best = 0;
                for (c, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }

    fn check_aligned(&self, other: &ScoreMatrix) -> Result<()> {
        if self.classes != other.classes {
            return Err(Error::Mismatch(format!(
                "class orderings differ: {:?} vs {:?}",
                self.classes, other.classes
            )));
        }
        if self.ids != other.ids {
            let first = self
                .ids
                .iter()
                .zip(&other.ids)
                .position(|(a, b)| a != b)
                .unwrap_or(self.ids.len().min(other.ids.len()));
            return Err(Error::Mismatch(format!("sample orderings differ at row {first}")));
        }
        Ok(())
    }

    /// Rows reordered to the given ids.
    pub fn reorder(&self, ids: &[String]) -> Result<ScoreMatrix> {
        let index: std::collections::HashMap<&str, usize> =
            self.ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut values = Vec::with_capacity(self.values.len());
        for id in ids {
            let r = *index
                .get(id.as_str())
                .ok_or_else(|| Error::Mismatch(format!("sample {id:?} missing from score matrix")))?;
            values.extend_from_slice(self.row(r));
        }
        let mut out = ScoreMatrix::new(ids.to_vec(), self.classes.clone(), values)?;
        out.provenance = self.provenance.clone();
        Ok(out)
    }
}

/// Correctly rounded floating-point sum (Shewchuk partials), so the result
/// does not depend on the order of the terms.
pub fn fsum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    // round the expansion to nearest
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        n -= 1;
        let x = hi;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}

/// Entry-wise sum of already normalized members.
pub fn sum_matrices(members: &[&ScoreMatrix]) -> Result<ScoreMatrix> {
    let first = members
        .first()
        .ok_or_else(|| Error::InvalidInput("fusion needs at least one member".into()))?;
    for m in &members[1..] {
        first.check_aligned(m)?;
    }
    let values = (0..first.values.len())
        .map(|e| fsum(members.iter().map(|m| m.values[e])))
        .collect();
    let mut out = ScoreMatrix::new(first.ids.clone(), first.classes.clone(), values)?;
    out.provenance = members.iter().flat_map(|m| m.provenance.iter().cloned()).collect();
    Ok(out)
}

/// Sum rule: every member is z-scored, then the members are added entry-wise.
pub fn sum_rule_fuse(members: &[&ScoreMatrix]) -> Result<ScoreMatrix> {
    let normalized: Vec<ScoreMatrix> = members.iter().map(|m| m.zscore().0).collect();
    let refs: Vec<&ScoreMatrix> = normalized.iter().collect();
    sum_matrices(&refs)
}

pub fn accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::Mismatch(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidInput("accuracy of an empty set".into()));
    }
    let correct = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(correct as f64 / truth.len() as f64)
}
