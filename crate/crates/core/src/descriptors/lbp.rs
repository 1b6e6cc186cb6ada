use super::sampling::{CircularSampler, NeighborhoodConfig};
use crate::error::Result;
use crate::image::GrayImage;

/// Per-pixel codes over the interior of an image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMap {
    pub width: usize,
    pub height: usize,
    pub bits: usize,
    pub codes: Vec<u32>,
}

impl CodeMap {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.codes[y * self.width + x]
    }
}

/// Binary pattern codes: bit `p` is set iff the interpolated neighbor `p` is
/// at least the center value. Borders of width `ceil(R)` are excluded.
pub fn lbp_codes(img: &GrayImage, cfg: NeighborhoodConfig) -> Result<CodeMap> {
    let sampler = CircularSampler::new(cfg)?;
    lbp_with(img, &sampler)
}

pub(crate) fn lbp_with(img: &GrayImage, sampler: &CircularSampler) -> Result<CodeMap> {
    let (w, h) = sampler.interior(img)?;
    let b = sampler.border();
    let mut codes = Vec::with_capacity(w * h);
    for y in b..b + h {
        for x in b..b + w {
            let c = img.get(x, y);
            let mut code = 0u32;
            for p in 0..sampler.points() {
                if sampler.diff(img, x, y, p, c) >= 0.0 {
                    code |= 1 << p;
                }
            }
            codes.push(code);
        }
    }
    Ok(CodeMap {
        width: w,
        height: h,
        bits: sampler.points(),
        codes,
    })
}
