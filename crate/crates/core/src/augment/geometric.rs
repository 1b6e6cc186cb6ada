//! Reflection, scaling, rotation, translation and shear with bilinear resampling.

use rand::Rng;

use crate::image::{lerp, GrayImage, Image};

/// One draw of geometric parameters. Angles in degrees, shifts in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoSpec {
    pub flip_lr: bool,
    pub flip_tb: bool,
    pub scale: (f64, f64),
    pub rotation: f64,
    pub translation: (f64, f64),
    pub shear: (f64, f64),
}

impl Default for GeoSpec {
    fn default() -> Self {
        Self {
            flip_lr: false,
            flip_tb: false,
            scale: (1.0, 1.0),
            rotation: 0.0,
            translation: (0.0, 0.0),
            shear: (0.0, 0.0),
        }
    }
}

impl GeoSpec {
    /// Forward 2x2 map (shear . rotation . scale) and offset (shear . translation)
    /// in center-relative coordinates.
    fn affine(&self) -> ([[f64; 2]; 2], [f64; 2]) {
        let (sx, sy) = self.scale;
        let (s, c) = self.rotation.to_radians().sin_cos();
        let (hx, hy) = (self.shear.0.to_radians().tan(), self.shear.1.to_radians().tan());
        let rs = [[c * sx, -s * sy], [s * sx, c * sy]];
        let sh = [[1.0, hx], [hy, 1.0]];
        let a = [
            [
                sh[0][0] * rs[0][0] + sh[0][1] * rs[1][0],
                sh[0][0] * rs[0][1] + sh[0][1] * rs[1][1],
            ],
            [
                sh[1][0] * rs[0][0] + sh[1][1] * rs[1][0],
                sh[1][0] * rs[0][1] + sh[1][1] * rs[1][1],
            ],
        ];
        let (tx, ty) = self.translation;
        let b = [tx + hx * ty, hy * tx + ty];
        (a, b)
    }

    fn is_affine_identity(&self) -> bool {
        self.scale == (1.0, 1.0) && self.rotation == 0.0 && self.translation == (0.0, 0.0) && self.shear == (0.0, 0.0)
    }
}

fn sample_bilinear(img: &GrayImage, x: f64, y: f64) -> f64 {
    const EPS: f64 = 1e-9;
    let (w, h) = (img.width() as f64, img.height() as f64);
    if x < -EPS || y < -EPS || x > w - 1.0 + EPS || y > h - 1.0 + EPS {
        return 0.0;
    }
    let x = x.clamp(0.0, w - 1.0);
    let y = y.clamp(0.0, h - 1.0);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(img.width() - 1), (y0 + 1).min(img.height() - 1));
    let (fx, fy) = (x - x0 as f64, y - y0 as f64);
    let top = lerp(img.get(x0, y0), img.get(x1, y0), fx);
    let bottom = lerp(img.get(x0, y1), img.get(x1, y1), fx);
    lerp(top, bottom, fy)
}

/// Applies the transform to one plane. Flips are exact; the remaining steps are
/// composed into one affine map about the image center and resampled once,
/// with zero fill outside the source.
pub fn transform_plane(img: &GrayImage, spec: &GeoSpec) -> GrayImage {
    let mut out = img.clone();
    if spec.flip_lr {
        out = out.flip_horizontal();
    }
    if spec.flip_tb {
        out = out.flip_vertical();
    }
    if spec.is_affine_identity() {
        return out;
    }
    let (a, b) = spec.affine();
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
    let (w, h) = (out.width(), out.height());
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let src = out;
    GrayImage::from_fn(w, h, |x, y| {
        let (u, v) = (x as f64 - cx - b[0], y as f64 - cy - b[1]);
        let sx = inv[0][0] * u + inv[0][1] * v + cx;
        let sy = inv[1][0] * u + inv[1][1] * v + cy;
        sample_bilinear(&src, sx, sy).clamp(0.0, 255.0)
    })
    .expect("dimensions preserved")
}

pub fn geometric_transform(img: &Image, spec: &GeoSpec) -> Image {
    img.map_planes(|p| transform_plane(p, spec))
}

/// Draws the parameters of geometric protocol `level` (1 to 4).
///
/// 1: left-right reflection with probability 1/2. 2: both reflections and
/// per-axis scale factors in `[1, 2]`. 3: adds rotation in `[-10, 10]` and
/// shifts in `[0, 5]`. 4: adds per-axis shear in `[0, 30]`.
pub fn draw_geo_spec<R: Rng>(level: u8, rng: &mut R) -> GeoSpec {
    let mut spec = GeoSpec {
        flip_lr: rng.gen::<f64>() < 0.5,
        ..GeoSpec::default()
    };
    if level >= 2 {
        spec.flip_tb = rng.gen::<f64>() < 0.5;
        spec.scale = (rng.gen_range(1.0..=2.0), rng.gen_range(1.0..=2.0));
    }
    if level >= 3 {
        spec.rotation = rng.gen_range(-10.0..=10.0);
        spec.translation = (rng.gen_range(0.0..=5.0), rng.gen_range(0.0..=5.0));
    }
    if level >= 4 {
        spec.shear = (rng.gen_range(0.0..=30.0), rng.gen_range(0.0..=30.0));
    }
    spec
}
