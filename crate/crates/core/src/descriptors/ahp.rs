//! Adaptive hybrid patterns.
//!
//! Binary patterns thresholded at data-driven quantization levels: Gaussian
//! quantiles of the global intensity spread for the global patterns, and
//! Laplace quantiles of the local (or global) spread for the local patterns.

use statrs::function::erf::erf_inv;

use super::mapping::{uniform_mapping, MappingKind};
use super::sampling::{CircularSampler, NeighborhoodConfig};
use super::{normalized_histogram, FeatureVector};
use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, PartialEq)]
pub struct AhpConfig {
    pub levels: usize,
    pub scales: Vec<NeighborhoodConfig>,
}

impl Default for AhpConfig {
    fn default() -> Self {
        Self {
            levels: 5,
            scales: vec![NeighborhoodConfig::new(1.0, 8), NeighborhoodConfig::new(2.0, 16)],
        }
    }
}

impl AhpConfig {
    pub fn fingerprint(&self) -> String {
        let scales: Vec<String> = self
            .scales
            .iter()
            .map(|s| format!("({},{})", s.radius, s.points))
            .collect();
        format!("n={};scales={};map=u2", self.levels, scales.join(""))
    }
}

/// `sqrt(2) * erfinv((2i - n) / n)` for `i = 1..n-1`: standard normal
/// quantiles at `i / n`, to be scaled by the global standard deviation.
pub fn gaussian_thresholds(levels: usize) -> Vec<f64> {
    let n = levels as f64;
    (1..levels)
        .map(|i| std::f64::consts::SQRT_2 * erf_inv((2.0 * i as f64 - n) / n))
        .collect()
}

/// Laplace quantile factors for `i = 1..n-1`, to be scaled by a standard deviation.
///
/// `sqrt(2)/2 * ln(2i/n)` below the median, `-sqrt(2)/2 * ln((2n-2i)/n)` above;
/// the median itself (even `n`) maps to 0.
pub fn laplace_thresholds(levels: usize) -> Vec<f64> {
    let n = levels as f64;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (1..levels)
        .map(|i| {
            let i = i as f64;
            if 2.0 * i < n {
                h * (2.0 * i / n).ln()
            } else if 2.0 * i > n {
                -h * ((2.0 * n - 2.0 * i) / n).ln()
            } else {
                0.0
            }
        })
        .collect()
}

fn population_std(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Per scale: u2 histograms of the `n-1` global maps, then the `n-1` local
/// maps with local spread, then the `n-1` local maps with global spread.
pub fn ahp_descriptor(img: &GrayImage, cfg: &AhpConfig) -> Result<FeatureVector> {
    if cfg.levels < 2 {
        return Err(Error::InvalidInput("AHP needs at least 2 quantization levels".into()));
    }
    let sigma_global = img.std();
    let mean_global = img.mean();
    let gauss = gaussian_thresholds(cfg.levels);
    let laplace = laplace_thresholds(cfg.levels);
    let thr_global: Vec<f64> = gauss.iter().map(|g| g * sigma_global).collect();
    let thr_local_global: Vec<f64> = laplace.iter().map(|l| l * sigma_global).collect();
    let m = cfg.levels - 1;

    let mut values = Vec::new();
    let mut blocks = Vec::new();
    for &scale in &cfg.scales {
        let sampler = CircularSampler::new(scale)?;
        let mapping = uniform_mapping(scale.points, MappingKind::U2)?;
        let (w, h) = sampler.interior(img)?;
        let b = sampler.border();
        let p = sampler.points();
        // maps[k] holds codes of map k in pixel order
        let mut maps: Vec<Vec<u32>> = vec![Vec::with_capacity(w * h); 3 * m];
        let mut to_mean = vec![0.0; p];
        let mut to_center = vec![0.0; p];
        for y in b..b + h {
            for x in b..b + w {
                let c = img.get(x, y);
                sampler.diffs(img, x, y, mean_global, &mut to_mean);
                sampler.diffs(img, x, y, c, &mut to_center);
                let sigma_local = population_std(&to_center);
                let code = |d: &[f64], thr: f64| {
                    d.iter()
                        .enumerate()
                        .filter(|(_, v)| **v - thr >= 0.0)
                        .fold(0u32, |acc, (bit, _)| acc | (1 << bit))
                };
                for i in 0..m {
                    maps[i].push(code(&to_mean, thr_global[i]));
                    maps[m + i].push(code(&to_center, laplace[i] * sigma_local));
                    maps[2 * m + i].push(code(&to_center, thr_local_global[i]));
                }
            }
        }
        for codes in maps {
            let hist = normalized_histogram(codes.iter().map(|&c| mapping.map(c)), mapping.bins);
            blocks.push(hist.len());
            values.extend(hist);
        }
    }
    Ok(FeatureVector::histogram("ahp", cfg.fingerprint(), values, blocks))
}
