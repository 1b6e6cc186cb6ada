//! Image model: real-valued gray planes in `[0, 255]`, three-plane color
//! images with a colorspace tag, decoding, colorspace conversion and
//! bilinear resizing.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-channel image, row-major, values in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    /// Builds an image, checking the length and that every value is finite and in range.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "image data has {} values, expected {}x{}={}",
                data.len(),
                width,
                height,
                width * height
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 255.0) {
            return Err(Error::InvalidInput(format!(
                "pixel value {v} outside [0, 255]"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image clamping every value into `[0, 255]` (NaN becomes 0).
    pub fn from_clamped(width: usize, height: usize, mut data: Vec<f64>) -> Result<Self> {
        for v in &mut data {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 255.0) };
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        let m = self.mean();
        (self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64).sqrt()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Applies `f` to every pixel and clamps the result into range.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GrayImage {
        let data = self
            .data
            .iter()
            .map(|&v| {
                let r = f(v);
                if r.is_nan() {
                    0.0
                } else {
                    r.clamp(0.0, 255.0)
                }
            })
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Rotates by 90 degrees clockwise.
    pub fn rotate90(&self) -> GrayImage {
        let (w, h) = (self.width, self.height);
        let mut data = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                // new image is h wide, w tall
                let nx = h - 1 - y;
                let ny = x;
                data[ny * h + nx] = self.get(x, y);
            }
        }
        GrayImage {
            width: h,
            height: w,
            data,
        }
    }

    pub fn flip_horizontal(&self) -> GrayImage {
        let mut data = Vec::with_capacity(self.data.len());
        for y in 0..self.height {
            let row = &self.data[y * self.width..(y + 1) * self.width];
            data.extend(row.iter().rev());
        }
        GrayImage {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn flip_vertical(&self) -> GrayImage {
        let mut data = Vec::with_capacity(self.data.len());
        for y in (0..self.height).rev() {
            data.extend_from_slice(&self.data[y * self.width..(y + 1) * self.width]);
        }
        GrayImage {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColorSpace {
    Rgb,
    Hsv,
    CieLab,
}

/// Three planes of equal size plus the colorspace they are expressed in.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    planes: [GrayImage; 3],
    space: ColorSpace,
}

impl ColorImage {
    pub fn new(planes: [GrayImage; 3], space: ColorSpace) -> Result<Self> {
        let (w, h) = (planes[0].width(), planes[0].height());
        if planes.iter().any(|p| p.width() != w || p.height() != h) {
            return Err(Error::InvalidInput(
                "color planes must share dimensions".into(),
            ));
        }
        Ok(Self { planes, space })
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn planes(&self) -> &[GrayImage; 3] {
        &self.planes
    }

    pub fn plane(&self, c: usize) -> &GrayImage {
        &self.planes[c]
    }

    pub fn into_planes(self) -> [GrayImage; 3] {
        self.planes
    }
}

/// A decoded image: grayscale, or true color.
#[derive(Debug, Clone, PartialEq)]
pub enum Image {
    Gray(GrayImage),
    Color(ColorImage),
}

impl Image {
    pub fn width(&self) -> usize {
        match self {
            Image::Gray(g) => g.width(),
            Image::Color(c) => c.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Image::Gray(g) => g.height(),
            Image::Color(c) => c.height(),
        }
    }

    pub fn is_color(&self) -> bool {
        matches!(self, Image::Color(_))
    }

    /// The planes as a slice: one for gray, three for color.
    pub fn planes(&self) -> &[GrayImage] {
        match self {
            Image::Gray(g) => std::slice::from_ref(g),
            Image::Color(c) => c.planes(),
        }
    }

    /// Rebuilds an image of the same kind from new planes.
    pub fn with_planes(&self, planes: Vec<GrayImage>) -> Result<Image> {
        match (self, planes.len()) {
            (Image::Gray(_), 1) => Ok(Image::Gray(planes.into_iter().next().unwrap())),
            (Image::Color(c), 3) => {
                let mut it = planes.into_iter();
                let p = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
                Ok(Image::Color(ColorImage::new(p, c.space())?))
            }
            (_, n) => Err(Error::InvalidInput(format!(
                "plane count {n} does not match image kind"
            ))),
        }
    }

    pub fn map_planes(&self, f: impl Fn(&GrayImage) -> GrayImage) -> Image {
        let planes = self.planes().iter().map(f).collect();
        self.with_planes(planes).expect("plane count preserved")
    }

    /// Luma of a color image; gray images are returned unchanged.
    pub fn luma(&self) -> GrayImage {
        match self {
            Image::Gray(g) => g.clone(),
            Image::Color(c) => to_gray(c).unwrap_or_else(|_| c.plane(0).clone()),
        }
    }
}

/// Rec. 601 luma.
pub fn to_gray(img: &ColorImage) -> Result<GrayImage> {
    if img.space() != ColorSpace::Rgb {
        return Err(Error::InvalidInput(format!(
            "grayscale conversion needs RGB input, got {:?}",
            img.space()
        )));
    }
    let [r, g, b] = img.planes();
    let data = r
        .data()
        .iter()
        .zip(g.data())
        .zip(b.data())
        .map(|((&r, &g), &b)| (0.299 * r + 0.587 * g + 0.114 * b).clamp(0.0, 255.0))
        .collect();
    GrayImage::new(img.width(), img.height(), data)
}

/// HSV of one RGB pixel with every component in `[0, 1]` (hue as a fraction of a turn).
pub fn rgb_to_hsv_unit(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        ((g - b) / delta).rem_euclid(6.0) / 6.0
    } else if max == g {
        ((b - r) / delta + 2.0) / 6.0
    } else {
        ((r - g) / delta + 4.0) / 6.0
    };
    (h, s, v)
}

/// CIELab (D65 white) of one sRGB pixel given in `[0, 1]`.
pub fn rgb_to_lab(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    fn linear(c: f64) -> f64 {
        if c <= 0.04045 {
            c / 12.92
        } else {
            ((c + 0.055) / 1.055).powf(2.4)
        }
    }
    fn f(t: f64) -> f64 {
        const D: f64 = 6.0 / 29.0;
        if t > D * D * D {
            t.cbrt()
        } else {
            t / (3.0 * D * D) + 4.0 / 29.0
        }
    }
    let (r, g, b) = (linear(r), linear(g), linear(b));
    let x = 0.412_456_4 * r + 0.357_576_1 * g + 0.180_437_5 * b;
    let y = 0.212_672_9 * r + 0.715_152_2 * g + 0.072_175_0 * b;
    let z = 0.019_333_9 * r + 0.119_192_0 * g + 0.950_304_1 * b;
    let (fx, fy, fz) = (f(x / 0.950_47), f(y), f(z / 1.088_83));
    (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

/// Converts an RGB image to HSV or CIELab with every channel rescaled to `[0, 255]`.
///
/// HSV: hue turn, saturation and value scaled by 255. CIELab: `L * 2.55`,
/// `a + 128`, `b + 128`, clamped.
pub fn convert_colorspace(img: &ColorImage, target: ColorSpace) -> Result<ColorImage> {
    if img.space() != ColorSpace::Rgb {
        return Err(Error::InvalidInput(format!(
            "colorspace conversion needs RGB input, got {:?}",
            img.space()
        )));
    }
    if target == ColorSpace::Rgb {
        return Ok(img.clone());
    }
    let n = img.width() * img.height();
    let mut out = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    let [r, g, b] = img.planes();
    for i in 0..n {
        let (rr, gg, bb) = (r.data()[i] / 255.0, g.data()[i] / 255.0, b.data()[i] / 255.0);
        let (c0, c1, c2) = match target {
            ColorSpace::Hsv => {
                let (h, s, v) = rgb_to_hsv_unit(rr, gg, bb);
                (h * 255.0, s * 255.0, v * 255.0)
            }
            ColorSpace::CieLab => {
                let (l, a, bl) = rgb_to_lab(rr, gg, bb);
                (l * 2.55, a + 128.0, bl + 128.0)
            }
            ColorSpace::Rgb => unreachable!(),
        };
        out[0].push(c0.clamp(0.0, 255.0));
        out[1].push(c1.clamp(0.0, 255.0));
        out[2].push(c2.clamp(0.0, 255.0));
    }
    let (w, h) = (img.width(), img.height());
    let [p0, p1, p2] = out;
    ColorImage::new(
        [
            GrayImage::new(w, h, p0)?,
            GrayImage::new(w, h, p1)?,
            GrayImage::new(w, h, p2)?,
        ],
        target,
    )
}

/// Bilinear resize with corner pixel centers aligned: output pixel `x` samples
/// input position `x * (w_in - 1) / (w_out - 1)`.
pub fn resize_bilinear(img: &GrayImage, new_width: usize, new_height: usize) -> Result<GrayImage> {
    if new_width == 0 || new_height == 0 {
        return Err(Error::InvalidInput(format!(
            "resize target must be positive, got {new_width}x{new_height}"
        )));
    }
    if new_width == img.width() && new_height == img.height() {
        return Ok(img.clone());
    }
    let map = |i: usize, n_in: usize, n_out: usize| -> (usize, usize, f64) {
        let pos = if n_out == 1 {
            (n_in as f64 - 1.0) / 2.0
        } else {
            i as f64 * (n_in as f64 - 1.0) / (n_out as f64 - 1.0)
        };
        let i0 = (pos.floor() as usize).min(n_in - 1);
        let i1 = (i0 + 1).min(n_in - 1);
        (i0, i1, pos - i0 as f64)
    };
    let xs: Vec<_> = (0..new_width).map(|x| map(x, img.width(), new_width)).collect();
    let mut data = Vec::with_capacity(new_width * new_height);
    for y in 0..new_height {
        let (y0, y1, fy) = map(y, img.height(), new_height);
        for &(x0, x1, fx) in &xs {
            let top = lerp(img.get(x0, y0), img.get(x1, y0), fx);
            let bottom = lerp(img.get(x0, y1), img.get(x1, y1), fx);
            data.push(lerp(top, bottom, fy).clamp(0.0, 255.0));
        }
    }
    GrayImage::new(new_width, new_height, data)
}

/// `a + t (b - a)`: exact at `t = 0` and on constant inputs.
#[inline]
pub(crate) fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else {
        a + t * (b - a)
    }
}

pub fn resize_image(img: &Image, new_width: usize, new_height: usize) -> Result<Image> {
    let planes = img
        .planes()
        .iter()
        .map(|p| resize_bilinear(p, new_width, new_height))
        .collect::<Result<Vec<_>>>()?;
    img.with_planes(planes)
}

/// Converts a decoded image into the toolkit's model.
///
/// 16-bit data is rescaled linearly to `[0, 255]`, alpha is dropped, and a
/// color image whose three channels are identical is treated as grayscale.
pub fn from_dynamic(img: DynamicImage) -> Result<Image> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let has_color = img.color().has_color();
    let (planes, scale): (Vec<Vec<f64>>, f64) = match img {
        DynamicImage::ImageLuma8(_) | DynamicImage::ImageLumaA8(_) => {
            let buf = img.to_luma8();
            (vec![buf.into_raw().into_iter().map(f64::from).collect()], 1.0)
        }
        DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA16(_) => {
            let buf = img.to_luma16();
            (
                vec![buf.into_raw().into_iter().map(f64::from).collect()],
                255.0 / 65535.0,
            )
        }
        DynamicImage::ImageRgb16(_) | DynamicImage::ImageRgba16(_) => {
            let buf = img.to_rgb16().into_raw();
            (split_rgb(buf.into_iter().map(f64::from)), 255.0 / 65535.0)
        }
        DynamicImage::ImageRgb32F(_) | DynamicImage::ImageRgba32F(_) => {
            let buf = img.to_rgb32f().into_raw();
            (split_rgb(buf.into_iter().map(f64::from)), 255.0)
        }
        other => {
            if has_color {
                let buf = other.to_rgb8().into_raw();
                (split_rgb(buf.into_iter().map(f64::from)), 1.0)
            } else {
                let buf = other.to_luma8();
                (vec![buf.into_raw().into_iter().map(f64::from).collect()], 1.0)
            }
        }
    };
    let mut planes: Vec<GrayImage> = planes
        .into_iter()
        .map(|p| GrayImage::from_clamped(w, h, p.into_iter().map(|v| v * scale).collect()))
        .collect::<Result<_>>()?;
    if planes.len() == 1 || (planes[0] == planes[1] && planes[1] == planes[2]) {
        return Ok(Image::Gray(planes.swap_remove(0)));
    }
    let mut it = planes.into_iter();
    Ok(Image::Color(ColorImage::new(
        [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()],
        ColorSpace::Rgb,
    )?))
}

fn split_rgb(values: impl Iterator<Item = f64>) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new(), Vec::new(), Vec::new()];
    for (i, v) in values.enumerate() {
        out[i % 3].push(v);
    }
    out
}

/// Decodes an in-memory image file (PNG, TIFF, JPEG, BMP).
pub fn decode_bytes(bytes: &[u8]) -> std::result::Result<Image, String> {
    let dynamic = image::load_from_memory(bytes).map_err(|e| e.to_string())?;
    from_dynamic(dynamic).map_err(|e| e.to_string())
}

pub fn load_image(path: &Path) -> Result<Image> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_bytes(&bytes).map_err(|message| Error::Decode {
        path: path.to_path_buf(),
        message,
    })
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Writes an 8-bit PNG (gray or RGB).
pub fn save_png(img: &Image, path: &Path) -> Result<()> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let result = match img {
        Image::Gray(g) => {
            let raw: Vec<u8> = g.data().iter().map(|&v| to_u8(v)).collect();
            ImageBuffer::<Luma<u8>, _>::from_raw(w, h, raw)
                .expect("buffer length matches")
                .save_with_format(path, image::ImageFormat::Png)
        }
        Image::Color(c) => {
            let [r, g, b] = c.planes();
            let mut raw = Vec::with_capacity(3 * r.data().len());
            for i in 0..r.data().len() {
                raw.extend([to_u8(r.data()[i]), to_u8(g.data()[i]), to_u8(b.data()[i])]);
            }
            image::RgbImage::from_raw(w, h, raw)
                .expect("buffer length matches")
                .save_with_format(path, image::ImageFormat::Png)
        }
    };
    result.map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Decode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}
