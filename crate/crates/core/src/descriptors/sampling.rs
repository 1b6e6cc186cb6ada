//! Circular neighborhood sampling with bilinear interpolation.
//!
//! Offsets are generated for the first quadrant and rotated by exact
//! quarter turns, and per-axis interpolation weights are derived from the
//! absolute offset. Together with magnitude-ordered summation this makes a
//! sample at a rotated or mirrored position bit-identical to the original,
//! which keeps rotation-invariant descriptors exactly invariant.

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Radius and neighbor count of a circular neighborhood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodConfig {
    pub radius: f64,
    pub points: usize,
}

impl NeighborhoodConfig {
    pub const fn new(radius: f64, points: usize) -> Self {
        Self { radius, points }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidInput(format!(
                "neighborhood radius must be positive, got {}",
                self.radius
            )));
        }
        if ![4, 8, 16].contains(&self.points) {
            return Err(Error::InvalidInput(format!(
                "neighbor count must be 4, 8 or 16, got {}",
                self.points
            )));
        }
        Ok(())
    }

    /// Border width excluded on each side.
    pub fn border(&self) -> usize {
        self.radius.ceil() as usize
    }

    /// `(dx, dy)` offset of neighbor `p`, x to the right and y downwards.
    pub fn offset(&self, p: usize) -> (f64, f64) {
        let quarter = self.points / 4;
        let base = p % quarter;
        let theta = 2.0 * std::f64::consts::PI * base as f64 / self.points as f64;
        let (mut x, mut y) = (snap(self.radius * theta.cos()), snap(self.radius * theta.sin()));
        for _ in 0..p / quarter {
            (x, y) = (-y, x);
        }
        (x, y)
    }
}

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

fn axis_taps(d: f64) -> Vec<(isize, f64)> {
    let a = d.abs();
    let fl = a.floor();
    let frac = a - fl;
    let sign = if d < 0.0 { -1 } else { 1 };
    let fl = fl as isize;
    if frac == 0.0 {
        vec![(sign * fl, 1.0)]
    } else {
        vec![(sign * fl, 1.0 - frac), (sign * (fl + 1), frac)]
    }
}

#[derive(Debug, Clone)]
struct Tap {
    dx: isize,
    dy: isize,
    weight: f64,
}

/// Precomputed interpolation taps for every neighbor of a configuration.
#[derive(Debug, Clone)]
pub struct CircularSampler {
    cfg: NeighborhoodConfig,
    taps: Vec<Vec<Tap>>,
}

impl CircularSampler {
    pub fn new(cfg: NeighborhoodConfig) -> Result<Self> {
        cfg.validate()?;
        let taps = (0..cfg.points)
            .map(|p| {
                let (dx, dy) = cfg.offset(p);
                let mut taps = Vec::with_capacity(4);
                for &(ox, wx) in &axis_taps(dx) {
                    for &(oy, wy) in &axis_taps(dy) {
                        taps.push(Tap {
                            dx: ox,
                            dy: oy,
                            weight: wx * wy,
                        });
                    }
                }
                taps
            })
            .collect();
        Ok(Self { cfg, taps })
    }

    pub fn config(&self) -> NeighborhoodConfig {
        self.cfg
    }

    pub fn points(&self) -> usize {
        self.cfg.points
    }

    pub fn border(&self) -> usize {
        self.cfg.border()
    }

    /// Interior size `(width, height)` after cropping the border, or an error
    /// when the image is too small.
    pub fn interior(&self, img: &GrayImage) -> Result<(usize, usize)> {
        let b = self.border();
        if img.width() <= 2 * b || img.height() <= 2 * b {
            return Err(Error::InvalidInput(format!(
                "image {}x{} too small for radius {}",
                img.width(),
                img.height(),
                self.cfg.radius
            )));
        }
        Ok((img.width() - 2 * b, img.height() - 2 * b))
    }

    /// Interpolated `q_p - reference` for neighbor `p` of pixel `(x, y)`.
    ///
    /// `(x, y)` must lie at least `border()` pixels inside the image.
    #[inline]
    pub fn diff(&self, img: &GrayImage, x: usize, y: usize, p: usize, reference: f64) -> f64 {
        let taps = &self.taps[p];
        let at = |t: &Tap| {
            img.get(
                (x as isize + t.dx) as usize,
                (y as isize + t.dy) as usize,
            )
        };
        if taps.len() == 1 {
            return at(&taps[0]) - reference;
        }
        let mut terms = [0.0f64; 4];
        for (slot, t) in terms.iter_mut().zip(taps) {
            *slot = t.weight * (at(t) - reference);
        }
        let terms = &mut terms[..taps.len()];
        terms.sort_unstable_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
        terms.iter().fold(0.0, |acc, v| acc + v)
    }

    /// All neighbor differences of pixel `(x, y)` against `reference`.
    #[inline]
    pub fn diffs(&self, img: &GrayImage, x: usize, y: usize, reference: f64, out: &mut [f64]) {
        for (p, slot) in out.iter_mut().enumerate().take(self.cfg.points) {
            *slot = self.diff(img, x, y, p, reference);
        }
    }
}
