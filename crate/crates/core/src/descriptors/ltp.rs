//! Multiscale uniform local ternary patterns.

use super::mapping::{uniform_mapping, MappingKind};
use super::sampling::{CircularSampler, NeighborhoodConfig};
use super::{normalized_histogram, FeatureVector};
use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, PartialEq)]
pub struct LtpConfig {
    pub threshold: f64,
    pub scales: Vec<NeighborhoodConfig>,
}

impl Default for LtpConfig {
    fn default() -> Self {
        Self {
            threshold: 3.0,
            scales: vec![NeighborhoodConfig::new(1.0, 8), NeighborhoodConfig::new(2.0, 16)],
        }
    }
}

impl LtpConfig {
    pub fn fingerprint(&self) -> String {
        let scales: Vec<String> = self
            .scales
            .iter()
            .map(|s| format!("({},{})", s.radius, s.points))
            .collect();
        format!("tau={};scales={}", self.threshold, scales.join(""))
    }
}

/// Positive and negative binary patterns of the ternary code at every interior pixel.
///
/// A neighbor difference `x` is `+1` when `x >= tau`, `-1` when `x < -tau`,
/// and `0` otherwise.
pub fn ltp_codes(img: &GrayImage, cfg: NeighborhoodConfig, tau: f64) -> Result<(Vec<u32>, Vec<u32>)> {
    let sampler = CircularSampler::new(cfg)?;
    let (w, h) = sampler.interior(img)?;
    let b = sampler.border();
    let mut pos = Vec::with_capacity(w * h);
    let mut neg = Vec::with_capacity(w * h);
    for y in b..b + h {
        for x in b..b + w {
            let c = img.get(x, y);
            let (mut up, mut down) = (0u32, 0u32);
            for p in 0..sampler.points() {
                let d = sampler.diff(img, x, y, p, c);
                if d >= tau {
                    up |= 1 << p;
                } else if d < -tau {
                    down |= 1 << p;
                }
            }
            pos.push(up);
            neg.push(down);
        }
    }
    Ok((pos, neg))
}

/// Per scale: u2 histograms of the positive then negative patterns, each
/// L1-normalized. 604 values for the default two scales.
pub fn ltp_descriptor(img: &GrayImage, cfg: &LtpConfig) -> Result<FeatureVector> {
    if !(cfg.threshold > 0.0) {
        return Err(Error::InvalidInput(format!(
            "LTP threshold must be positive, got {}",
            cfg.threshold
        )));
    }
    let mut values = Vec::new();
    let mut blocks = Vec::new();
    for &scale in &cfg.scales {
        let mapping = uniform_mapping(scale.points, MappingKind::U2)?;
        let (pos, neg) = ltp_codes(img, scale, cfg.threshold)?;
        for codes in [pos, neg] {
            let hist = normalized_histogram(codes.iter().map(|&c| mapping.map(c)), mapping.bins);
            blocks.push(hist.len());
            values.extend(hist);
        }
    }
    Ok(FeatureVector::histogram("ltp", cfg.fingerprint(), values, blocks))
}
