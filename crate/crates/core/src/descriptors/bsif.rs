//! Binarized statistical image features with filters learned by ICA, and
//! the size x threshold bank built on them.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::FeatureVector;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::rng;

/// Learned filters, one row of `size * size` weights per bit.
#[derive(Debug, Clone, PartialEq)]
pub struct BsifFilterBank {
    pub size: usize,
    pub filters: Vec<Vec<f64>>,
    pub seed: u64,
    pub patch_count: usize,
}

impl BsifFilterBank {
    /// Bank from explicit filters (each of length `size * size`).
    pub fn from_filters(size: usize, filters: Vec<Vec<f64>>) -> Result<Self> {
        if filters.is_empty() || filters.len() > 16 {
            return Err(Error::InvalidInput(format!(
                "BSIF needs 1..=16 filters, got {}",
                filters.len()
            )));
        }
        if filters.iter().any(|f| f.len() != size * size) {
            return Err(Error::InvalidInput("filter length must be size^2".into()));
        }
        if filters.iter().any(|f| f.iter().all(|&v| v == 0.0)) {
            return Err(Error::InvalidInput("BSIF filters must be non-zero".into()));
        }
        Ok(Self {
            size,
            filters,
            seed: 0,
            patch_count: 0,
        })
    }

    pub fn bits(&self) -> usize {
        self.filters.len()
    }

    pub fn fingerprint(&self) -> String {
        format!(
            "l={};n={};seed={};patches={}",
            self.size,
            self.bits(),
            self.seed,
            self.patch_count
        )
    }
}

/// ICA settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcaOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for IcaOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 1000,
        }
    }
}

/// Draws `count` random `size x size` patches (row-major) from the images.
pub fn sample_patches(images: &[&GrayImage], size: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let usable: Vec<&GrayImage> = images
        .iter()
        .copied()
        .filter(|im| im.width() >= size && im.height() >= size)
        .collect();
    if usable.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no training image is at least {size}x{size}"
        )));
    }
    let mut r = rng::stream(seed, "bsif-patches", size as u64, "bsif");
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let im = usable[r.gen_range(0..usable.len())];
        let x0 = r.gen_range(0..=im.width() - size);
        let y0 = r.gen_range(0..=im.height() - size);
        let mut patch = Vec::with_capacity(size * size);
        for y in y0..y0 + size {
            for x in x0..x0 + size {
                patch.push(im.get(x, y));
            }
        }
        out.push(patch);
    }
    Ok(out)
}

/// Inverse square root of a symmetric positive definite matrix.
fn inv_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    if eig.eigenvalues.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Numerical("ICA decorrelation hit a singular matrix".into()));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

fn decorrelate(w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(inv_sqrt(&(w * w.transpose()))? * w)
}

/// Learns `n_bits` filters of side `size` by symmetric FastICA (tanh
/// nonlinearity) on PCA-whitened, DC-removed patches.
///
/// Each learned filter is scaled to unit Euclidean norm so responses are in
/// gray levels and thresholds keep their meaning across datasets.
pub fn bsif_learn_filters(
    patches: &[Vec<f64>],
    size: usize,
    n_bits: usize,
    seed: u64,
    opts: IcaOptions,
) -> Result<BsifFilterBank> {
    let d = size * size;
    if size < 2 {
        return Err(Error::InvalidInput("BSIF filter size must be >= 2".into()));
    }
    if n_bits == 0 || n_bits >= d || n_bits > 16 {
        return Err(Error::InvalidInput(format!(
            "BSIF bit count must be in 1..{} (and <= 16), got {n_bits}",
            d
        )));
    }
    if patches.len() < 50 * d {
        return Err(Error::InvalidInput(format!(
            "BSIF learning needs at least {} patches of size {size}, got {}",
            50 * d,
            patches.len()
        )));
    }
    if patches.iter().any(|p| p.len() != d) {
        return Err(Error::InvalidInput("patch length must be size^2".into()));
    }
    let n = patches.len();
    let mut x = DMatrix::<f64>::zeros(d, n);
    for (j, p) in patches.iter().enumerate() {
        let dc = p.iter().sum::<f64>() / d as f64;
        for (i, v) in p.iter().enumerate() {
            x[(i, j)] = v - dc;
        }
    }
    for i in 0..d {
        let m = x.row(i).sum() / n as f64;
        x.row_mut(i).iter_mut().for_each(|v| *v -= m);
    }
    let cov = (&x * x.transpose()) / n as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]];
    let mut whiten = DMatrix::<f64>::zeros(n_bits, d);
    for (row, &k) in order.iter().take(n_bits).enumerate() {
        let lambda = eig.eigenvalues[k];
        if !(lambda > 1e-12 * top.max(f64::MIN_POSITIVE)) {
            return Err(Error::Numerical(format!(
                "patch covariance has rank {row} < {n_bits}; patches lack variation"
            )));
        }
        let v = eig.eigenvectors.column(k);
        for j in 0..d {
            whiten[(row, j)] = v[j] / lambda.sqrt();
        }
    }
    let z = &whiten * &x;

    let mut r = rng::stream(seed, "bsif-ica", size as u64, "bsif");
    let init = DMatrix::from_fn(n_bits, n_bits, |_, _| r.sample::<f64, _>(StandardNormal));
    let mut w = decorrelate(&init)?;
    let mut last_change = f64::INFINITY;
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let y = &w * &z;
        let g = y.map(f64::tanh);
        let mean_dg: Vec<f64> = (0..n_bits)
            .map(|i| g.row(i).iter().map(|t| 1.0 - t * t).sum::<f64>() / n as f64)
            .collect();
        let mut next = (&g * z.transpose()) / n as f64;
        for i in 0..n_bits {
            for j in 0..n_bits {
                next[(i, j)] -= mean_dg[i] * w[(i, j)];
            }
        }
        let next = decorrelate(&next)?;
        let overlap = &next * w.transpose();
        last_change = (0..n_bits)
            .map(|i| (1.0 - overlap[(i, i)].abs()).abs())
            .fold(0.0, f64::max);
        w = next;
        if last_change < opts.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::IcaNotConverged {
            iterations: opts.max_iterations,
            last_change,
        });
    }
    let unmix = &w * &whiten;
    let filters = (0..n_bits)
        .map(|i| {
            let row: Vec<f64> = unmix.row(i).iter().copied().collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            row.into_iter().map(|v| v / norm).collect()
        })
        .collect();
    Ok(BsifFilterBank {
        size,
        filters,
        seed,
        patch_count: n,
    })
}

/// Filter responses at every pixel where the filter fits, pixel-major.
pub fn bsif_responses(img: &GrayImage, bank: &BsifFilterBank) -> Result<(usize, usize, Vec<f64>)> {
    let l = bank.size;
    if img.width() < l || img.height() < l {
        return Err(Error::InvalidInput(format!(
            "BSIF filter {l}x{l} larger than image {}x{}",
            img.width(),
            img.height()
        )));
    }
    let (ow, oh) = (img.width() - l + 1, img.height() - l + 1);
    let bits = bank.bits();
    let mut out = Vec::with_capacity(ow * oh * bits);
    let mut patch = vec![0.0; l * l];
    for y in 0..oh {
        for x in 0..ow {
            for dy in 0..l {
                for dx in 0..l {
                    patch[dy * l + dx] = img.get(x + dx, y + dy);
                }
            }
            for f in &bank.filters {
                out.push(f.iter().zip(&patch).map(|(a, b)| a * b).sum());
            }
        }
    }
    Ok((ow, oh, out))
}

fn histogram_from_responses(responses: &[f64], bits: usize, th: f64) -> Vec<f64> {
    let mut hist = vec![0.0; 1 << bits];
    let count = responses.len() / bits;
    for s in responses.chunks(bits) {
        let code = s
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > th)
            .fold(0usize, |acc, (i, _)| acc | (1 << i));
        hist[code] += 1.0;
    }
    hist.iter_mut().for_each(|v| *v /= count as f64);
    hist
}

/// Codes with bit `i` set iff the response of filter `i` exceeds `th`,
/// as an L1-normalized `2^n`-bin histogram.
pub fn bsif_descriptor(img: &GrayImage, bank: &BsifFilterBank, th: f64) -> Result<FeatureVector> {
    let (_, _, resp) = bsif_responses(img, bank)?;
    let hist = histogram_from_responses(&resp, bank.bits(), th);
    let len = hist.len();
    Ok(FeatureVector::histogram(
        "bsif",
        format!("{};th={th}", bank.fingerprint()),
        hist,
        vec![len],
    ))
}

pub const FBSIF_SIZES: [usize; 5] = [3, 5, 7, 9, 11];
pub const FBSIF_THRESHOLDS: [f64; 7] = [-9.0, -6.0, -3.0, 0.0, 3.0, 6.0, 9.0];

/// One vector per (bank, threshold), bank-major.
pub fn fbsif_bank(img: &GrayImage, banks: &[BsifFilterBank], thresholds: &[f64]) -> Result<Vec<FeatureVector>> {
    let mut out = Vec::with_capacity(banks.len() * thresholds.len());
    for bank in banks {
        let (_, _, resp) = bsif_responses(img, bank)?;
        for &th in thresholds {
            let hist = histogram_from_responses(&resp, bank.bits(), th);
            let len = hist.len();
            out.push(FeatureVector::histogram(
                "fbsif",
                format!("{};th={th}", bank.fingerprint()),
                hist,
                vec![len],
            ));
        }
    }
    Ok(out)
}

/// Learns one bank per size from patches of the given training planes.
pub fn learn_fbsif_banks(
    training: &[&GrayImage],
    sizes: &[usize],
    n_bits: usize,
    patches_per_bank: usize,
    seed: u64,
    opts: IcaOptions,
) -> Result<Vec<BsifFilterBank>> {
    sizes
        .iter()
        .map(|&size| {
            let patches = sample_patches(training, size, patches_per_bank.max(50 * size * size), seed)?;
            bsif_learn_filters(&patches, size, n_bits.min(size * size - 1), seed, opts)
        })
        .collect()
}
