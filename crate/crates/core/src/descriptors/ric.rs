//! Rotation-invariant co-occurrence of adjacent LBP codes.
//!
//! Pairs of 8-bit codes are counted at a fixed displacement in four
//! orientations. A pair is labelled by its equivalence class under
//! simultaneous cyclic rotation of both codes and under reversal
//! `(A, B) ~ (B, A)`, which is what a displacement turning into its opposite
//! produces. With the 8-neighbor codes this makes the descriptor exactly
//! invariant to quarter-turn rotations of the image.

use std::sync::OnceLock;

use super::lbp::lbp_with;
use super::sampling::{CircularSampler, NeighborhoodConfig};
use super::FeatureVector;
use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, PartialEq)]
pub struct RicConfig {
    pub radii: Vec<f64>,
    /// Pair interval as a multiple of the radius.
    pub interval_factor: f64,
}

impl Default for RicConfig {
    fn default() -> Self {
        Self {
            radii: vec![1.0, 2.0, 4.0],
            interval_factor: 2.0,
        }
    }
}

impl RicConfig {
    pub fn fingerprint(&self) -> String {
        let radii: Vec<String> = self.radii.iter().map(|r| r.to_string()).collect();
        format!("radii={};interval={}xR;P=8", radii.join(","), self.interval_factor)
    }
}

#[inline]
fn rotl8(c: u32, k: u32) -> u32 {
    ((c << k) | (c >> (8 - k))) & 0xff
}

/// Minimum of `(A << 8) | B` over the 16 group elements acting on the pair.
pub fn canonical_pair(a: u32, b: u32) -> u32 {
    let mut best = u32::MAX;
    for k in 0..8 {
        let (ra, rb) = (rotl8(a, k), rotl8(b, k));
        best = best.min((ra << 8) | rb).min((rb << 8) | ra);
    }
    best
}

struct PairClasses {
    label: Vec<u16>,
    count: usize,
}

fn pair_classes() -> &'static PairClasses {
    static TABLE: OnceLock<PairClasses> = OnceLock::new();
    TABLE.get_or_init(|| {
        let canon: Vec<u32> = (0..65536u32).map(|v| canonical_pair(v >> 8, v & 0xff)).collect();
        let mut reps = canon.clone();
        reps.sort_unstable();
        reps.dedup();
        let label = canon
            .iter()
            .map(|c| reps.binary_search(c).expect("representative present") as u16)
            .collect();
        PairClasses {
            label,
            count: reps.len(),
        }
    })
}

/// Number of pair classes, i.e. bins per radius (4150).
pub fn pair_class_count() -> usize {
    pair_classes().count
}

/// Integer displacements for orientations 0, 45, 90 and 135 degrees.
pub fn displacements(interval: f64) -> [(isize, isize); 4] {
    let diag = (interval * std::f64::consts::FRAC_1_SQRT_2).round() as isize;
    let r = interval.round() as isize;
    [(r, 0), (diag, diag), (0, r), (-diag, diag)]
}

pub fn ric_descriptor(img: &GrayImage, cfg: &RicConfig) -> Result<FeatureVector> {
    if !(cfg.interval_factor > 0.0) {
        return Err(Error::InvalidInput("pair interval must be positive".into()));
    }
    let classes = pair_classes();
    let mut values = Vec::with_capacity(cfg.radii.len() * classes.count);
    let mut blocks = Vec::new();
    for &radius in &cfg.radii {
        let sampler = CircularSampler::new(NeighborhoodConfig::new(radius, 8))?;
        let codes = lbp_with(img, &sampler)?;
        let (w, h) = (codes.width as isize, codes.height as isize);
        let mut hist = vec![0.0; classes.count];
        let mut total = 0usize;
        for (dx, dy) in displacements(cfg.interval_factor * radius) {
            for y in 0..h {
                let y2 = y + dy;
                if y2 < 0 || y2 >= h {
                    continue;
                }
                for x in 0..w {
                    let x2 = x + dx;
                    if x2 < 0 || x2 >= w {
                        continue;
                    }
                    let a = codes.get(x as usize, y as usize);
                    let b = codes.get(x2 as usize, y2 as usize);
                    hist[classes.label[((a << 8) | b) as usize] as usize] += 1.0;
                    total += 1;
                }
            }
        }
        if total == 0 {
            return Err(Error::InvalidInput(format!(
                "image {}x{} too small for co-occurrence at radius {radius}",
                img.width(),
                img.height()
            )));
        }
        hist.iter_mut().for_each(|v| *v /= total as f64);
        blocks.push(hist.len());
        values.extend(hist);
    }
    Ok(FeatureVector::histogram("ric", cfg.fingerprint(), values, blocks))
}
