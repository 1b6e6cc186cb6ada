//! Per-channel PCA bases fitted on training images.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::image::{resize_bilinear, GrayImage};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis {
    /// Side of the square images the basis works on.
    pub size: usize,
    pub mean: Vec<f64>,
    /// Orthonormal rows, in decreasing order of explained variance.
    pub components: Vec<Vec<f64>>,
    /// Share of total variance of each retained component.
    pub explained: Vec<f64>,
    pub channel: usize,
    /// Number of images the basis was fitted on.
    pub fit_count: usize,
}

impl PcaBasis {
    /// True when the training images were all identical.
    pub fn is_degenerate(&self) -> bool {
        self.components.is_empty()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.mean.len() {
            return Err(Error::Mismatch(format!(
                "PCA basis expects {} values, got {len}",
                self.mean.len()
            )));
        }
        Ok(())
    }

    /// `components (x - mean)`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        Ok(self
            .components
            .iter()
            .map(|row| row.iter().zip(&centered).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `mean + components^T coeffs`.
    pub fn reconstruct(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.components.len() {
            return Err(Error::Mismatch(format!(
                "PCA basis has {} components, got {} coefficients",
                self.components.len(),
                coeffs.len()
            )));
        }
        let mut out = self.mean.clone();
        for (row, &c) in self.components.iter().zip(coeffs) {
            for (o, r) in out.iter_mut().zip(row) {
                *o += c * r;
            }
        }
        Ok(out)
    }

    /// Projects a plane after resizing it to the basis size.
    pub fn project_plane(&self, plane: &GrayImage) -> Result<Vec<f64>> {
        let r = resize_bilinear(plane, self.size, self.size)?;
        self.project(r.data())
    }
}

/// Fits a basis on `training` planes resized to `size x size`, keeping the
/// fewest leading components whose variance share reaches `keep`.
pub fn fit_pca(training: &[&GrayImage], size: usize, keep: f64, channel: usize) -> Result<PcaBasis> {
    if training.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "PCA needs at least 2 training images, got {}",
            training.len()
        )));
    }
    if !(0.0..=1.0).contains(&keep) {
        return Err(Error::InvalidInput(format!("variance share {keep} outside [0, 1]")));
    }
    let d = size * size;
    let rows: Vec<GrayImage> = training
        .iter()
        .map(|p| resize_bilinear(p, size, size))
        .collect::<Result<_>>()?;
    let n = rows.len();
    let mut mean = vec![0.0; d];
    for r in &rows {
        for (m, v) in mean.iter_mut().zip(r.data()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    // Components from the n x n Gram matrix of the centered rows:
    // G = X X^T = W L W^T, component k = X^T w_k / sqrt(l_k).
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.data().iter().zip(&mean).map(|(v, m)| v - m).collect())
        .collect();
    let gram = DMatrix::from_fn(n, n, |i, j| {
        centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum::<f64>()
    });
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let l_max = eig.eigenvalues[order[0]].max(0.0);
    let tol = l_max * n as f64 * f64::EPSILON * 16.0;
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&k| l_max > 0.0 && eig.eigenvalues[k] > tol)
        .collect();
    let component = |k: usize| -> Vec<f64> {
        let w = eig.eigenvectors.column(k);
        let mut v = vec![0.0; d];
        for (i, row) in centered.iter().enumerate() {
            for (o, x) in v.iter_mut().zip(row) {
                *o += w[i] * x;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        v
    };
    let total: f64 = kept.iter().map(|&k| eig.eigenvalues[k]).sum();
    let mut components = Vec::new();
    let mut explained = Vec::new();
    let mut cumulative = 0.0;
    for &i in &kept {
        if cumulative >= keep - 1e-12 && !components.is_empty() {
            break;
        }
        let share = eig.eigenvalues[i] / total;
        cumulative += share;
        explained.push(share);
        let mut v = component(i);
        for _ in 0..2 {
            for prev in &components {
                let dot: f64 = v.iter().zip(prev).map(|(a, b): (&f64, &f64)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        components.push(v);
    }
    Ok(PcaBasis {
        size,
        mean,
        components,
        explained,
        channel,
        fit_count: n,
    })
}
