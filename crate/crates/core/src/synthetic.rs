//! Seeded three-class texture set: oriented gratings, checkerboards and
//! Gaussian noise.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::image::{save_png, GrayImage, Image};
use crate::learning::MemorySource;
use crate::rng;

pub const CLASSES: [&str; 3] = ["checkerboard", "grating", "noise"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub per_class: usize,
    pub size: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            per_class: 50,
            size: 64,
            seed: 2024,
        }
    }
}

fn texture(class: &str, size: usize, rng: &mut impl Rng) -> Result<GrayImage> {
    let contrast = rng.gen_range(30.0..90.0);
    let mean = rng.gen_range(100.0..150.0);
    let jitter = Normal::new(0.0, 4.0).expect("valid sigma");
    let pixel = |v: f64, rng: &mut dyn rand::RngCore| (v + jitter.sample(rng)).round().clamp(0.0, 255.0);
    match class {
        "grating" => {
            let theta = rng.gen_range(0.0..PI);
            let period = rng.gen_range(6.0..14.0);
            let phase = rng.gen_range(0.0..2.0 * PI);
            let (c, s) = (theta.cos(), theta.sin());
            let mut data = Vec::with_capacity(size * size);
            for y in 0..size {
                for x in 0..size {
                    let t = (x as f64 * c + y as f64 * s) * 2.0 * PI / period + phase;
                    data.push(pixel(mean + contrast * t.sin(), rng));
                }
            }
            GrayImage::new(size, size, data)
        }
        "checkerboard" => {
            let cell = rng.gen_range(4..11);
            let (ox, oy) = (rng.gen_range(0..cell), rng.gen_range(0..cell));
            let mut data = Vec::with_capacity(size * size);
            for y in 0..size {
                for x in 0..size {
                    let on = ((x + ox) / cell + (y + oy) / cell) % 2 == 0;
                    data.push(pixel(if on { mean + contrast } else { mean - contrast }, rng));
                }
            }
            GrayImage::new(size, size, data)
        }
        "noise" => {
            let noise = Normal::new(mean, contrast / 2.0).expect("valid sigma");
            let data = (0..size * size).map(|_| noise.sample(rng).round().clamp(0.0, 255.0)).collect();
            GrayImage::new(size, size, data)
        }
        other => Err(Error::InvalidInput(format!("unknown synthetic class {other}"))),
    }
}

/// Generates the set in memory. Sample ids are `<class>/<class>_<nnn>.png`.
pub fn generate(spec: &SyntheticSpec) -> Result<(Dataset, MemorySource)> {
    if spec.per_class == 0 || spec.size < 16 {
        return Err(Error::InvalidInput("need at least one image per class and size >= 16".into()));
    }
    let mut samples = Vec::new();
    let mut images = Vec::new();
    for class in CLASSES {
        for i in 0..spec.per_class {
            let id = format!("{class}/{class}_{i:03}.png");
            let mut r = rng::stream(spec.seed, &id, 0, "synthetic");
            images.push(Image::Gray(texture(class, spec.size, &mut r)?));
            samples.push(Sample {
                path: PathBuf::from(&id),
                id,
                label: class.to_string(),
            });
        }
    }
    Ok((Dataset::new(samples)?, MemorySource { images }))
}

/// Writes the set as `root/<class>/<file>.png`.
pub fn write(spec: &SyntheticSpec, root: &Path) -> Result<Dataset> {
    let (ds, src) = generate(spec)?;
    let mut samples = Vec::with_capacity(ds.len());
    for (s, img) in ds.samples().iter().zip(&src.images) {
        let path = root.join(&s.id);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        save_png(img, &path)?;
        samples.push(Sample {
            path,
            ..s.clone()
        });
    }
    Dataset::new(samples)
}
