//! Threshold adjacency statistics over seven intensity ranges.

use super::FeatureVector;
use crate::image::GrayImage;

pub const DEFAULT_CUTOFF: f64 = 30.0;

/// The seven inclusive ranges derived from the image mean and cut-off, clamped to `[0, 255]`.
pub fn etas_ranges(mean: f64, cutoff: f64) -> [(f64, f64); 7] {
    let c = |v: f64| v.clamp(0.0, 255.0);
    let (lo, mid, hi) = (mean - cutoff, mean, mean + cutoff);
    [
        (c(mid), 255.0),
        (c(lo), 255.0),
        (c(lo), c(hi)),
        (c(mid), c(255.0 - cutoff)),
        (c(lo), c(255.0 - cutoff)),
        (c(hi), c(255.0 - cutoff)),
        (c(hi), 255.0),
    ]
}

/// Fraction of foreground pixels having exactly `k` foreground 8-neighbors,
/// `k = 0..=8`, over pixels not on the image border. All zero when there is
/// no foreground.
pub fn adjacency_statistics(mask: &[bool], width: usize, height: usize) -> [f64; 9] {
    let mut counts = [0.0; 9];
    let mut total = 0.0;
    if width < 3 || height < 3 {
        return counts;
    }
    for y in 1..height - 1 {
        for x in 1..width - 1 {
            if !mask[y * width + x] {
                continue;
            }
            let mut k = 0;
            for dy in [-1isize, 0, 1] {
                for dx in [-1isize, 0, 1] {
                    if (dx, dy) == (0, 0) {
                        continue;
                    }
                    let (nx, ny) = ((x as isize + dx) as usize, (y as isize + dy) as usize);
                    if mask[ny * width + nx] {
                        k += 1;
                    }
                }
            }
            counts[k] += 1.0;
            total += 1.0;
        }
    }
    if total > 0.0 {
        counts.iter_mut().for_each(|v| *v /= total);
    }
    counts
}

/// ETAS with an explicit reference mean.
pub fn etas_with_mean(img: &GrayImage, mean: f64, cutoff: f64) -> FeatureVector {
    let mut values = Vec::with_capacity(63);
    for (lo, hi) in etas_ranges(mean, cutoff) {
        let mask: Vec<bool> = img.data().iter().map(|&v| v >= lo && v <= hi).collect();
        values.extend(adjacency_statistics(&mask, img.width(), img.height()));
    }
    FeatureVector::fractions("etas", format!("tau={cutoff}"), values, vec![9; 7])
}

/// 63 values: nine adjacency fractions for each of the seven ranges.
pub fn etas_descriptor(img: &GrayImage, cutoff: f64) -> FeatureVector {
    etas_with_mean(img, img.mean(), cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_for_mean_100() {
        let r = etas_ranges(100.0, 30.0);
        assert_eq!(
            r,
            [
                (100.0, 255.0),
                (70.0, 255.0),
                (70.0, 130.0),
                (100.0, 225.0),
                (70.0, 225.0),
                (130.0, 225.0),
                (130.0, 255.0)
            ]
        );
        let r = etas_ranges(10.0, 30.0);
        assert_eq!(r[1].0, 0.0);
    }

    #[test]
    fn all_white_and_empty_masks() {
        let s = adjacency_statistics(&[true; 25], 5, 5);
        assert_eq!(s, [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(adjacency_statistics(&[false; 25], 5, 5), [0.0; 9]);
    }

    #[test]
    fn tuples_sum_to_one_or_zero() {
        let img = GrayImage::from_fn(16, 16, |x, y| ((x * 31 + y * 17) % 256) as f64).unwrap();
        let fv = etas_descriptor(&img, DEFAULT_CUTOFF);
        assert_eq!(fv.values.len(), 63);
        for block in fv.values.chunks(9) {
            let s: f64 = block.iter().sum();
            assert!(s == 0.0 || (s - 1.0).abs() < 1e-12);
        }
    }
}
