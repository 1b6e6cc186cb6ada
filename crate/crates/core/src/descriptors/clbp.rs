//! Completed LBP: joint sign / magnitude / center histogram.

use super::mapping::{uniform_mapping, MappingKind};
use super::sampling::{CircularSampler, NeighborhoodConfig};
use super::FeatureVector;
use crate::error::Result;
use crate::image::GrayImage;

/// Sign, magnitude and center components at every interior pixel.
#[derive(Debug, Clone)]
pub struct ClbpMaps {
    pub sign: Vec<u32>,
    pub magnitude: Vec<u32>,
    pub center: Vec<bool>,
    /// Mean of all neighbor magnitudes over the image, the magnitude threshold.
    pub mean_magnitude: f64,
}

pub fn clbp_maps(img: &GrayImage, cfg: NeighborhoodConfig) -> Result<ClbpMaps> {
    let sampler = CircularSampler::new(cfg)?;
    let (w, h) = sampler.interior(img)?;
    let b = sampler.border();
    let p = sampler.points();
    let mut diffs = vec![0.0; w * h * p];
    let mut sign = Vec::with_capacity(w * h);
    let mut center = Vec::with_capacity(w * h);
    let image_mean = img.mean();
    let mut i = 0;
    for y in b..b + h {
        for x in b..b + w {
            let c = img.get(x, y);
            let d = &mut diffs[i * p..(i + 1) * p];
            sampler.diffs(img, x, y, c, d);
            let code = d
                .iter()
                .enumerate()
                .filter(|(_, v)| **v >= 0.0)
                .fold(0u32, |acc, (bit, _)| acc | (1 << bit));
            sign.push(code);
            center.push(c >= image_mean);
            i += 1;
        }
    }
    let mean_magnitude = diffs.iter().map(|d| d.abs()).sum::<f64>() / diffs.len() as f64;
    let magnitude = diffs
        .chunks(p)
        .map(|d| {
            d.iter()
                .enumerate()
                .filter(|(_, v)| v.abs() >= mean_magnitude)
                .fold(0u32, |acc, (bit, _)| acc | (1 << bit))
        })
        .collect();
    Ok(ClbpMaps {
        sign,
        magnitude,
        center,
        mean_magnitude,
    })
}

/// Joint riu2(S) x riu2(M) x C histogram per scale, each L1-normalized,
/// scales concatenated: 200 + 648 values for (1,8) and (2,16).
pub fn clbp_descriptor(img: &GrayImage, scales: &[NeighborhoodConfig]) -> Result<FeatureVector> {
    let mut values = Vec::new();
    let mut blocks = Vec::new();
    for &cfg in scales {
        let mapping = uniform_mapping(cfg.points, MappingKind::Riu2)?;
        let maps = clbp_maps(img, cfg)?;
        let nb = mapping.bins;
        let mut hist = vec![0.0; nb * nb * 2];
        for i in 0..maps.sign.len() {
            let s = mapping.map(maps.sign[i]);
            let m = mapping.map(maps.magnitude[i]);
            let c = maps.center[i] as usize;
            hist[(s * nb + m) * 2 + c] += 1.0;
        }
        let total = maps.sign.len() as f64;
        hist.iter_mut().for_each(|v| *v /= total);
        blocks.push(hist.len());
        values.extend(hist);
    }
    let cfg: Vec<String> = scales.iter().map(|s| format!("({},{})", s.radius, s.points)).collect();
    Ok(FeatureVector::histogram("clbp", format!("scales={}", cfg.join("")), values, blocks))
}

pub fn default_scales() -> Vec<NeighborhoodConfig> {
    vec![NeighborhoodConfig::new(1.0, 8), NeighborhoodConfig::new(2.0, 16)]
}
