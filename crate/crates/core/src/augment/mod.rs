//! Geometric augmentation protocols and the DCT / PCA coefficient
//! perturbation protocols, with seeded per-sample randomness.

pub mod dct;
pub mod export;
pub mod geometric;
pub mod pca;
pub mod perturb;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{resize_bilinear, GrayImage, Image};

pub use dct::{dct2, idct2, DctPlan};
pub use export::{export_augmented, parse_augment_manifest, ExportOptions, ManifestRow};
pub use geometric::{draw_geo_spec, geometric_transform, GeoSpec};
pub use pca::{fit_pca, PcaBasis};
pub use perturb::{perturb_noise, perturb_swap, perturb_zero, Method, NoiseKind, PerturbParams};

/// Working side of the transform-domain protocols.
pub const DEFAULT_SIZE: usize = 224;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum App {
    App1,
    App2,
    App3,
    App4,
    App5,
    App6,
}

impl App {
    pub const ALL: [App; 6] = [App::App1, App::App2, App::App3, App::App4, App::App5, App::App6];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn needs_pca(self) -> bool {
        self == App::App5
    }
}

impl fmt::Display for App {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "app{}", self.number())
    }
}

impl FromStr for App {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let digits = t.strip_prefix("app").unwrap_or(&t);
        match digits.parse::<usize>() {
            Ok(n @ 1..=6) => Ok(App::ALL[n - 1]),
            _ => Err(Error::InvalidInput(format!("unknown augmentation {s:?}; valid: app1..app6"))),
        }
    }
}

/// Which perturbation the transform-domain protocols apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// One of the three, uniformly, per call.
    #[default]
    Random,
    Fixed(Method),
}

/// Inputs shared by all calls of one augmentation run.
#[derive(Debug, Clone)]
pub struct AugmentContext<'a> {
    /// One basis per plane; required by App5.
    pub bases: Option<&'a [PcaBasis]>,
    /// Same-class donor images for the swap method.
    pub donors: Vec<&'a Image>,
    pub method: MethodChoice,
    pub params: PerturbParams,
    /// Working side for App6.
    pub size: usize,
}

impl Default for AugmentContext<'_> {
    fn default() -> Self {
        Self {
            bases: None,
            donors: Vec::new(),
            method: MethodChoice::Random,
            params: PerturbParams::default(),
            size: DEFAULT_SIZE,
        }
    }
}

enum Domain<'a> {
    Dct(DctPlan),
    Pca(&'a [PcaBasis]),
}

impl Domain<'_> {
    fn side(&self, plane: usize) -> usize {
        match self {
            Domain::Dct(p) => p.size(),
            Domain::Pca(b) => b[plane].size,
        }
    }

    fn protected(&self) -> usize {
        match self {
            Domain::Dct(_) => 1,
            Domain::Pca(_) => 0,
        }
    }

    fn forward(&self, plane: usize, data: &[f64]) -> Result<Vec<f64>> {
        match self {
            Domain::Dct(p) => p.forward(data),
            Domain::Pca(b) => b[plane].project(data),
        }
    }

    /// Reconstruction of perturbed coefficients. For PCA the part of `data`
    /// outside the retained subspace is kept, so unperturbed coefficients
    /// give back `data`.
    fn inverse(&self, plane: usize, data: &[f64], orig: &[f64], coeffs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Domain::Dct(p) => p.inverse(coeffs),
            Domain::Pca(b) => {
                let basis = &b[plane];
                let delta: Vec<f64> = coeffs.iter().zip(orig).map(|(a, o)| a - o).collect();
                let mut out = data.to_vec();
                for (row, d) in basis.components.iter().zip(&delta) {
                    for (o, r) in out.iter_mut().zip(row) {
                        *o += d * r;
                    }
                }
                Ok(out)
            }
        }
    }
}

fn sample_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / n;
    (values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn choose_method<R: Rng>(choice: MethodChoice, rng: &mut R) -> Method {
    match choice {
        MethodChoice::Fixed(m) => m,
        MethodChoice::Random => Method::ALL[rng.gen_range(0..3)],
    }
}

fn transform_augment<R: Rng>(img: &Image, domain: &Domain, ctx: &AugmentContext, rng: &mut R) -> Result<Image> {
    ctx.params.validate()?;
    let planes = img.planes();
    if let Domain::Pca(b) = domain {
        if b.len() != planes.len() {
            return Err(Error::Mismatch(format!(
                "{} PCA bases for an image with {} planes",
                b.len(),
                planes.len()
            )));
        }
    }
    let method = choose_method(ctx.method, rng);
    let donors: Vec<&Image> = if method == Method::Three {
        let pool: Vec<usize> = (0..ctx.donors.len()).collect();
        let picked = perturb::pick_donors(&pool, ctx.params.donors, rng);
        if picked.is_empty() {
            vec![img; ctx.params.donors]
        } else {
            picked.into_iter().map(|i| ctx.donors[i]).collect()
        }
    } else {
        Vec::new()
    };
    if let Some(d) = donors.iter().find(|d| d.planes().len() != planes.len()) {
        return Err(Error::Mismatch(format!(
            "donor has {} planes, image has {}",
            d.planes().len(),
            planes.len()
        )));
    }
    let work: Vec<GrayImage> = planes
        .iter()
        .enumerate()
        .map(|(c, p)| {
            let n = domain.side(c);
            resize_bilinear(p, n, n)
        })
        .collect::<Result<_>>()?;
    let sigma = sample_std(work.iter().flat_map(|p| p.data().iter().copied()));
    let mut out_planes = Vec::with_capacity(planes.len());
    for (c, plane) in work.iter().enumerate() {
        let n = domain.side(c);
        let orig = domain.forward(c, plane.data())?;
        let mut coeffs = orig.clone();
        let protected = domain.protected();
        match method {
            Method::One => perturb_zero(&mut coeffs, ctx.params.zero_probability, protected, rng),
            Method::Two => perturb_noise(&mut coeffs, sigma, ctx.params.noise, protected, rng),
            Method::Three => {
                let donor_coeffs: Vec<Vec<f64>> = donors
                    .iter()
                    .map(|d| domain.forward(c, resize_bilinear(&d.planes()[c], n, n)?.data()))
                    .collect::<Result<_>>()?;
                let refs: Vec<&[f64]> = donor_coeffs.iter().map(|v| v.as_slice()).collect();
                perturb_swap(&mut coeffs, &refs, ctx.params.swap_probability, protected, rng)?;
            }
        }
        let rec = domain.inverse(c, plane.data(), &orig, &coeffs)?;
        let rec = GrayImage::from_clamped(n, n, rec)?;
        out_planes.push(resize_bilinear(&rec, planes[c].width(), planes[c].height())?);
    }
    let mut out = img.with_planes(out_planes)?;
    if rng.gen::<f64>() < 0.5 {
        out = out.map_planes(|p| p.flip_horizontal());
    }
    Ok(out)
}

/// Applies one protocol to an image. Output dimensions equal input dimensions
/// and values stay in `[0, 255]`.
pub fn augment_image<R: Rng>(img: &Image, app: App, ctx: &AugmentContext, rng: &mut R) -> Result<Image> {
    match app {
        App::App1 | App::App2 | App::App3 | App::App4 => {
            let spec = draw_geo_spec(app.number(), rng);
            Ok(geometric_transform(img, &spec))
        }
        App::App5 => {
            let bases = ctx
                .bases
                .ok_or_else(|| Error::InvalidInput("app5 needs fitted PCA bases".into()))?;
            transform_augment(img, &Domain::Pca(bases), ctx, rng)
        }
        App::App6 => {
            if ctx.size == 0 {
                return Err(Error::InvalidInput("app6 working size must be positive".into()));
            }
            transform_augment(img, &Domain::Dct(DctPlan::new(ctx.size)?), ctx, rng)
        }
    }
}
