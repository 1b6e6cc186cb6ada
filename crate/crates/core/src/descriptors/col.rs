//! Soft color statistics over RGB, HSV and CIELab.

use super::FeatureVector;
use crate::error::{Error, Result};
use crate::image::{convert_colorspace, ColorImage, ColorSpace, Image};

/// How the per-channel spread is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpreadForm {
    /// `sqrt(sum (x - mu)^2) / (n - 1)`.
    #[default]
    Printed,
    /// Ordinary sample standard deviation, `sqrt(sum (x - mu)^2 / (n - 1))`.
    Sample,
}

/// Mean, spread and third central moment of one channel scaled to `[0, 1]`.
pub fn channel_stats(values: &[f64], form: SpreadForm) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mu) * (v - mu)).sum();
    let sigma = if values.len() < 2 {
        0.0
    } else {
        match form {
            SpreadForm::Printed => ss.sqrt() / (n - 1.0),
            SpreadForm::Sample => (ss / (n - 1.0)).sqrt(),
        }
    };
    let m3 = values.iter().map(|v| (v - mu).powi(3)).sum::<f64>() / n;
    (mu, sigma, m3)
}

/// 27 values: for RGB, HSV and CIELab, for each channel, (mean, spread, third moment).
pub fn col_descriptor(img: &Image, form: SpreadForm) -> Result<FeatureVector> {
    let color = match img {
        Image::Color(c) => c,
        Image::Gray(_) => return Err(Error::InvalidInput("COL requires color".into())),
    };
    col_from_rgb(color, form)
}

pub fn col_from_rgb(color: &ColorImage, form: SpreadForm) -> Result<FeatureVector> {
    let mut values = Vec::with_capacity(27);
    for space in [ColorSpace::Rgb, ColorSpace::Hsv, ColorSpace::CieLab] {
        let converted = convert_colorspace(color, space)?;
        for plane in converted.planes() {
            let unit: Vec<f64> = plane.data().iter().map(|v| v / 255.0).collect();
            let (mu, sigma, m3) = channel_stats(&unit, form);
            values.extend([mu, sigma, m3]);
        }
    }
    let tag = match form {
        SpreadForm::Printed => "spread=printed;k=3",
        SpreadForm::Sample => "spread=sample;k=3",
    };
    Ok(FeatureVector::statistics("col", tag.to_string(), values))
}
