//! Local phase quantization and its multi-threshold bank.
//!
//! Short-term Fourier coefficients at the four lowest non-zero frequencies
//! `(a,0), (0,a), (a,a), (a,-a)` with `a = s / w` are computed over a `w x w`
//! window, decorrelated under a first-order Markov model of neighboring pixel
//! correlation `rho`, and quantized per component.

use nalgebra::{SMatrix, SymmetricEigen};

use super::FeatureVector;
use crate::error::{Error, Result};
use crate::image::GrayImage;

pub type Whitening = [[f64; 8]; 8];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpqConfig {
    /// Odd window side.
    pub window: usize,
    /// Frequency scale; the frequency is `scale / window`.
    pub scale: f64,
    /// Correlation coefficient of adjacent pixels.
    pub rho: f64,
    /// Ternary threshold on standardized coefficients; 0 gives binary LPQ.
    pub threshold: f64,
}

impl Default for LpqConfig {
    fn default() -> Self {
        Self {
            window: 7,
            scale: 1.0,
            rho: 0.9,
            threshold: 0.0,
        }
    }
}

impl LpqConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "LPQ window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if !(self.scale > 0.0) {
            return Err(Error::InvalidInput("LPQ frequency scale must be positive".into()));
        }
        if !(self.rho >= 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidInput(format!(
                "LPQ correlation must be in [0, 1), got {}",
                self.rho
            )));
        }
        if !(self.threshold >= 0.0) {
            return Err(Error::InvalidInput("LPQ threshold must be >= 0".into()));
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> String {
        format!(
            "w={};s={};rho={};tau={}",
            self.window, self.scale, self.rho, self.threshold
        )
    }
}

/// One-dimensional filters: `(re, im)` of `exp(-2 pi i a x)` for `x = -r..=r`,
/// with their means removed so no filter responds to a constant.
fn frequency_filter(window: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let r = (window / 2) as isize;
    let a = scale / window as f64;
    let (mut re, mut im): (Vec<f64>, Vec<f64>) = (-r..=r)
        .map(|x| {
            let phase = -2.0 * std::f64::consts::PI * a * x as f64;
            (phase.cos(), phase.sin())
        })
        .unzip();
    for v in [&mut re, &mut im] {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter_mut().for_each(|x| *x -= m);
    }
    (re, im)
}

/// The eight real 2-D kernels, row-major over the window, in the order
/// `Re F1, Im F1, Re F2, Im F2, Re F3, Im F3, Re F4, Im F4`.
pub fn lpq_kernels(window: usize, scale: f64) -> Vec<Vec<f64>> {
    let (re, im) = frequency_filter(window, scale);
    let ones = vec![1.0; window];
    let zeros = vec![0.0; window];
    // complex 1-D filters along x and y for each frequency
    let conj_im: Vec<f64> = im.iter().map(|v| -v).collect();
    let pairs: [((&[f64], &[f64]), (&[f64], &[f64])); 4] = [
        ((&re, &im), (&ones, &zeros)),
        ((&ones, &zeros), (&re, &im)),
        ((&re, &im), (&re, &im)),
        ((&re, &im), (&re, &conj_im)),
    ];
    let mut kernels = Vec::with_capacity(8);
    for ((xr, xi), (yr, yi)) in pairs {
        let mut kr = Vec::with_capacity(window * window);
        let mut ki = Vec::with_capacity(window * window);
        for y in 0..window {
            for x in 0..window {
                kr.push(xr[x] * yr[y] - xi[x] * yi[y]);
                ki.push(xr[x] * yi[y] + xi[x] * yr[y]);
            }
        }
        kernels.push(kr);
        kernels.push(ki);
    }
    kernels
}

/// Decorrelating transform for the eight coefficients.
///
/// Rows are eigenvectors of `M C M^T` (with `C[i][j] = rho^|p_i - p_j|` over
/// window positions) ordered by decreasing eigenvalue, each signed so its
/// largest-magnitude entry is positive. An already diagonal covariance gives
/// the identity.
pub fn whitening_transform(window: usize, scale: f64, rho: f64) -> Whitening {
    let kernels = lpq_kernels(window, scale);
    let n = window * window;
    let pos: Vec<(f64, f64)> = (0..n).map(|i| ((i % window) as f64, (i / window) as f64)).collect();
    let mut cov = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = ((pos[i].0 - pos[j].0).powi(2) + (pos[i].1 - pos[j].1).powi(2)).sqrt();
            cov[i * n + j] = if d == 0.0 { 1.0 } else { rho.powf(d) };
        }
    }
    let mut mc = vec![vec![0.0; n]; 8];
    for (k, kern) in kernels.iter().enumerate() {
        for j in 0..n {
            mc[k][j] = (0..n).map(|i| kern[i] * cov[i * n + j]).sum();
        }
    }
    let d = SMatrix::<f64, 8, 8>::from_fn(|a, b| (0..n).map(|j| mc[a][j] * kernels[b][j]).sum());
    let d = (d + d.transpose()) * 0.5;

    let max_diag = (0..8).map(|i| d[(i, i)].abs()).fold(0.0, f64::max);
    let max_off = (0..8)
        .flat_map(|i| (0..8).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| d[(i, j)].abs())
        .fold(0.0, f64::max);
    let mut out = [[0.0; 8]; 8];
    if max_off <= 1e-10 * max_diag {
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        return out;
    }
    let eig = SymmetricEigen::new(d);
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    for (row, &col) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(col);
        let lead = (0..8).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
        let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..8 {
            out[row][j] = sign * v[j];
        }
    }
    out
}

/// Whitened coefficients at every pixel where the window fits.
#[derive(Debug, Clone)]
pub struct LpqResponses {
    pub width: usize,
    pub height: usize,
    pub coeffs: Vec<[f64; 8]>,
}

fn convolve_rows(img: &[f64], w: usize, h: usize, filter: &[f64]) -> Vec<f64> {
    let k = filter.len();
    let ow = w - k + 1;
    let mut out = Vec::with_capacity(ow * h);
    for y in 0..h {
        let row = &img[y * w..(y + 1) * w];
        for x in 0..ow {
            out.push(row[x..x + k].iter().zip(filter).map(|(a, b)| a * b).sum());
        }
    }
    out
}

fn convolve_cols(img: &[f64], w: usize, h: usize, filter: &[f64]) -> Vec<f64> {
    let k = filter.len();
    let oh = h - k + 1;
    let mut out = vec![0.0; w * oh];
    for y in 0..oh {
        for (t, &f) in filter.iter().enumerate() {
            let src = &img[(y + t) * w..(y + t + 1) * w];
            let dst = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += f * s;
            }
        }
    }
    out
}

/// Raw (unwhitened) coefficients through separable filtering.
pub fn lpq_raw_responses(img: &GrayImage, window: usize, scale: f64) -> Result<LpqResponses> {
    if window > img.width() || window > img.height() {
        return Err(Error::InvalidInput(format!(
            "LPQ window {window} larger than image {}x{}",
            img.width(),
            img.height()
        )));
    }
    let (re, im) = frequency_filter(window, scale);
    let ones = vec![1.0; window];
    let (w, h) = (img.width(), img.height());
    let ow = w - window + 1;
    let oh = h - window + 1;
    let data = img.data();
    let row_dc = convolve_rows(data, w, h, &ones);
    let row_re = convolve_rows(data, w, h, &re);
    let row_im = convolve_rows(data, w, h, &im);
    let col = |src: &[f64], f: &[f64]| convolve_cols(src, ow, h, f);
    // F1 = x-frequency only, F2 = y-frequency only
    let f1r = col(&row_re, &ones);
    let f1i = col(&row_im, &ones);
    let f2r = col(&row_dc, &re);
    let f2i = col(&row_dc, &im);
    // products of complex row and column filters
    let rr = col(&row_re, &re);
    let ii = col(&row_im, &im);
    let ri = col(&row_re, &im);
    let ir = col(&row_im, &re);
    let n = ow * oh;
    let mut coeffs = Vec::with_capacity(n);
    for i in 0..n {
        coeffs.push([
            f1r[i],
            f1i[i],
            f2r[i],
            f2i[i],
            rr[i] - ii[i],
            ri[i] + ir[i],
            rr[i] + ii[i],
            ir[i] - ri[i],
        ]);
    }
    Ok(LpqResponses {
        width: ow,
        height: oh,
        coeffs,
    })
}

pub fn apply_whitening(resp: &mut LpqResponses, t: &Whitening) {
    for c in &mut resp.coeffs {
        let src = *c;
        for (row, dst) in t.iter().zip(c.iter_mut()) {
            *dst = row.iter().zip(&src).map(|(a, b)| a * b).sum();
        }
    }
}

pub fn lpq_responses(img: &GrayImage, cfg: &LpqConfig) -> Result<LpqResponses> {
    cfg.validate()?;
    let mut resp = lpq_raw_responses(img, cfg.window, cfg.scale)?;
    apply_whitening(&mut resp, &whitening_transform(cfg.window, cfg.scale, cfg.rho));
    Ok(resp)
}

fn histogram_256(codes: impl Iterator<Item = u32>, n: usize) -> Vec<f64> {
    let mut h = vec![0.0; 256];
    for c in codes {
        h[c as usize] += 1.0;
    }
    h.iter_mut().for_each(|v| *v /= n as f64);
    h
}

/// 8-bit sign codes: bit `i` set iff whitened component `i` is `>= 0`.
pub fn binary_codes(resp: &LpqResponses) -> Vec<u32> {
    resp.coeffs
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .filter(|(_, v)| **v >= 0.0)
                .fold(0u32, |acc, (i, _)| acc | (1 << i))
        })
        .collect()
}

/// Positive and negative codes after standardizing each component by its
/// per-image standard deviation: `+` when `z >= tau`, `-` when `z < -tau`.
pub fn ternary_codes(resp: &LpqResponses, tau: f64) -> (Vec<u32>, Vec<u32>) {
    let n = resp.coeffs.len() as f64;
    let mut scale = [0.0; 8];
    for (i, s) in scale.iter_mut().enumerate() {
        let mean = resp.coeffs.iter().map(|c| c[i]).sum::<f64>() / n;
        let var = resp.coeffs.iter().map(|c| (c[i] - mean).powi(2)).sum::<f64>() / n;
        *s = var.sqrt();
    }
    let mut pos = Vec::with_capacity(resp.coeffs.len());
    let mut neg = Vec::with_capacity(resp.coeffs.len());
    for c in &resp.coeffs {
        let (mut up, mut down) = (0u32, 0u32);
        for i in 0..8 {
            let z = if scale[i] > 0.0 { c[i] / scale[i] } else { 0.0 };
            if z >= tau {
                up |= 1 << i;
            } else if z < -tau {
                down |= 1 << i;
            }
        }
        pos.push(up);
        neg.push(down);
    }
    (pos, neg)
}

fn ternary_vector(resp: &LpqResponses, cfg: &LpqConfig) -> FeatureVector {
    let (pos, neg) = ternary_codes(resp, cfg.threshold);
    let n = pos.len();
    let mut values = histogram_256(pos.into_iter(), n);
    values.extend(histogram_256(neg.into_iter(), n));
    FeatureVector::histogram("lpq", cfg.fingerprint(), values, vec![256, 256])
}

/// Binary LPQ (256 bins) when the threshold is 0, ternary LPQ (2 x 256 bins) otherwise.
pub fn lpq_descriptor(img: &GrayImage, cfg: &LpqConfig) -> Result<FeatureVector> {
    let resp = lpq_responses(img, cfg)?;
    if cfg.threshold == 0.0 {
        let codes = binary_codes(&resp);
        let n = codes.len();
        Ok(FeatureVector::histogram(
            "lpq",
            cfg.fingerprint(),
            histogram_256(codes.into_iter(), n),
            vec![256],
        ))
    } else {
        Ok(ternary_vector(&resp, cfg))
    }
}

/// Ternary LPQ regardless of threshold (512 values).
pub fn lpq_ternary_descriptor(img: &GrayImage, cfg: &LpqConfig) -> Result<FeatureVector> {
    let resp = lpq_responses(img, cfg)?;
    Ok(ternary_vector(&resp, cfg))
}

/// Parameter grid of the multi-threshold bank.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpqGrid {
    pub radii: Vec<usize>,
    pub scales: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub rho: f64,
}

impl Default for MlpqGrid {
    fn default() -> Self {
        Self {
            radii: vec![1, 3, 5],
            scales: vec![0.75, 0.95, 1.15, 1.35, 1.55, 1.75, 1.95],
            thresholds: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            rho: 0.9,
        }
    }
}

impl MlpqGrid {
    /// Every configuration in bank order (radius, then scale, then threshold).
    pub fn configs(&self) -> Vec<LpqConfig> {
        let mut out = Vec::new();
        for &r in &self.radii {
            for &s in &self.scales {
                for &t in &self.thresholds {
                    out.push(LpqConfig {
                        window: 2 * r + 1,
                        scale: s,
                        rho: self.rho,
                        threshold: t,
                    });
                }
            }
        }
        out
    }
}

/// One ternary LPQ vector per grid configuration, in `MlpqGrid::configs` order.
pub fn mlpq_bank(img: &GrayImage, grid: &MlpqGrid) -> Result<Vec<FeatureVector>> {
    let mut out = Vec::with_capacity(grid.radii.len() * grid.scales.len() * grid.thresholds.len());
    for &r in &grid.radii {
        for &s in &grid.scales {
            let base = LpqConfig {
                window: 2 * r + 1,
                scale: s,
                rho: grid.rho,
                threshold: 0.0,
            };
            base.validate()?;
            let resp = lpq_responses(img, &base)?;
            for &t in &grid.thresholds {
                let cfg = LpqConfig { threshold: t, ..base };
                cfg.validate()?;
                let mut fv = ternary_vector(&resp, &cfg);
                fv.descriptor = "mlpq".into();
                out.push(fv);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_single_bin() {
        let img = GrayImage::filled(20, 20, 140.0).unwrap();
        let fv = lpq_descriptor(&img, &LpqConfig::default()).unwrap();
        assert_eq!(fv.values.iter().filter(|&&v| v == 1.0).count(), 1);
        let bank = mlpq_bank(&img, &MlpqGrid::default()).unwrap();
        assert_eq!(bank.len(), 105);
        for fv in &bank {
            assert_eq!(fv.values.len(), 512);
            assert_eq!(fv.values[..256].iter().filter(|&&v| v == 1.0).count(), 1);
            assert_eq!(fv.values[256..].iter().filter(|&&v| v == 1.0).count(), 1);
        }
    }

    #[test]
    fn kernels_have_zero_dc() {
        for s in [0.75, 1.0, 1.95] {
            for k in lpq_kernels(7, s) {
                assert!(k.iter().sum::<f64>().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn whitening_is_orthonormal_and_decorrelates() {
        for (w, s, rho) in [(3, 1.0, 0.9), (7, 1.35, 0.9), (11, 0.75, 0.5)] {
            let t = whitening_transform(w, s, rho);
            for i in 0..8 {
                for j in 0..8 {
                    let dot: f64 = (0..8).map(|k| t[i][k] * t[j][k]).sum();
                    assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn near_independent_pixels_leave_signs_unchanged() {
        // with rho -> 0 and the base frequency the covariance is a multiple of
        // the identity, so whitening does not touch the coefficients
        let t = whitening_transform(3, 1.0, 1e-300);
        for (i, row) in t.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn rejects_even_window_and_oversized_window() {
        let img = GrayImage::filled(5, 5, 1.0).unwrap();
        let even = LpqConfig { window: 4, ..LpqConfig::default() };
        assert!(lpq_descriptor(&img, &even).is_err());
        let big = LpqConfig { window: 7, ..LpqConfig::default() };
        assert!(lpq_descriptor(&img, &big).is_err());
    }
}
