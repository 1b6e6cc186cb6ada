//! Morphological measurements of an Otsu-segmented image.

use super::FeatureVector;
use crate::image::GrayImage;

/// Otsu threshold over 256 integer levels; foreground is `value > threshold`.
/// `None` when the image holds a single level.
pub fn otsu_threshold(img: &GrayImage) -> Option<u8> {
    let mut hist = [0usize; 256];
    for &v in img.data() {
        hist[v.round().clamp(0.0, 255.0) as usize] += 1;
    }
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let total = img.data().len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let mut best = (f64::NEG_INFINITY, 0u8);
    for (t, &c) in hist.iter().enumerate().take(255) {
        w0 += c as f64;
        sum0 += t as f64 * c as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if between > best.0 {
            best = (between, t as u8);
        }
    }
    Some(best.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub pixels: Vec<(usize, usize)>,
}

/// 8-connected components of a mask, in raster order of their first pixel.
pub fn connected_components(mask: &[bool], width: usize, height: usize) -> Vec<Region> {
    let mut seen = vec![false; mask.len()];
    let mut regions = Vec::new();
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(i) = stack.pop() {
            let (x, y) = (i % width, i / width);
            pixels.push((x, y));
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                        continue;
                    }
                    let j = ny as usize * width + nx as usize;
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        regions.push(Region { pixels });
    }
    regions
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Area of the convex hull of the pixel squares.
fn hull_area(pixels: &[(usize, usize)]) -> f64 {
    let mut pts: Vec<(i64, i64)> = pixels
        .iter()
        .flat_map(|&(x, y)| {
            let (x, y) = (x as i64, y as i64);
            [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]
        })
        .collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let twice: i64 = (0..hull.len())
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    twice.abs() as f64 / 2.0
}

/// Per-region measurements: area, perimeter, eccentricity, bbox aspect, solidity, extent.
pub fn region_measures(r: &Region, mask: &[bool], width: usize, height: usize) -> [f64; 6] {
    let area = r.pixels.len() as f64;
    let perimeter = r
        .pixels
        .iter()
        .filter(|&&(x, y)| {
            [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)].iter().any(|&(dx, dy)| {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                nx < 0
                    || ny < 0
                    || nx >= width as isize
                    || ny >= height as isize
                    || !mask[ny as usize * width + nx as usize]
            })
        })
        .count() as f64;
    let mx = r.pixels.iter().map(|p| p.0 as f64).sum::<f64>() / area;
    let my = r.pixels.iter().map(|p| p.1 as f64).sum::<f64>() / area;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in &r.pixels {
        let (dx, dy) = (x as f64 - mx, y as f64 - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let (sxx, syy, sxy) = (sxx / area, syy / area, sxy / area);
    let half_trace = (sxx + syy) / 2.0;
    let disc = (((sxx - syy) / 2.0).powi(2) + sxy * sxy).sqrt();
    let (l1, l2) = (half_trace + disc, (half_trace - disc).max(0.0));
    let eccentricity = if l1 > 0.0 { (1.0 - l2 / l1).max(0.0).sqrt() } else { 0.0 };
    let (x0, x1) = r.pixels.iter().fold((usize::MAX, 0), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = r.pixels.iter().fold((usize::MAX, 0), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (bw, bh) = ((x1 - x0 + 1) as f64, (y1 - y0 + 1) as f64);
    let hull = hull_area(&r.pixels);
    let solidity = if hull > 0.0 { (area / hull).min(1.0) } else { 1.0 };
    [area, perimeter, eccentricity, bw / bh, solidity, area / (bw * bh)]
}

/// Nine values: object count, foreground fraction, mean and standard
/// deviation of area, then means of perimeter, eccentricity, bounding-box
/// aspect ratio, solidity and extent. All zero for an empty foreground.
pub fn mor_descriptor(img: &GrayImage) -> FeatureVector {
    let (w, h) = (img.width(), img.height());
    let mask: Vec<bool> = match otsu_threshold(img) {
        Some(t) => img.data().iter().map(|&v| v.round() > t as f64).collect(),
        None => vec![false; w * h],
    };
    let regions = connected_components(&mask, w, h);
    let mut values = vec![0.0; 9];
    if !regions.is_empty() {
        let measures: Vec<[f64; 6]> = regions.iter().map(|r| region_measures(r, &mask, w, h)).collect();
        let n = measures.len() as f64;
        let mean = |i: usize| measures.iter().map(|m| m[i]).sum::<f64>() / n;
        let mean_area = mean(0);
        let std_area = (measures.iter().map(|m| (m[0] - mean_area).powi(2)).sum::<f64>() / n).sqrt();
        values = vec![
            n,
            mask.iter().filter(|&&b| b).count() as f64 / (w * h) as f64,
            mean_area,
            std_area,
            mean(1),
            mean(2),
            mean(3),
            mean(4),
            mean(5),
        ];
    }
    FeatureVector::statistics("mor", "otsu;8-conn".into(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares(origins: &[(usize, usize, usize)]) -> GrayImage {
        GrayImage::from_fn(40, 40, |x, y| {
            let inside = origins
                .iter()
                .any(|&(ox, oy, s)| x >= ox && x < ox + s && y >= oy && y < oy + s);
            if inside { 255.0 } else { 0.0 }
        })
        .unwrap()
    }

    #[test]
    fn black_image_is_zero() {
        let fv = mor_descriptor(&GrayImage::filled(10, 10, 0.0).unwrap());
        assert_eq!(fv.values, vec![0.0; 9]);
    }

    #[test]
    fn centered_square() {
        let fv = mor_descriptor(&squares(&[(15, 15, 10)]));
        assert_eq!(fv.values[0], 1.0);
        assert_eq!(fv.values[2], 100.0);
        assert_eq!(fv.values[3], 0.0);
        assert_eq!(fv.values[4], 36.0);
        assert_eq!(fv.values[5], 0.0);
        assert_eq!(fv.values[6], 1.0);
        assert_eq!(fv.values[7], 1.0);
        assert_eq!(fv.values[8], 1.0);
    }

    #[test]
    fn two_squares() {
        let fv = mor_descriptor(&squares(&[(2, 2, 4), (20, 20, 8)]));
        assert_eq!(fv.values[0], 2.0);
        assert_eq!(fv.values[2], (16.0 + 64.0) / 2.0);
        assert_eq!(fv.values[3], 24.0);
    }

    #[test]
    fn l_shape_solidity_below_one() {
        let img = GrayImage::from_fn(20, 20, |x, y| {
            if (x >= 5 && x < 15 && y >= 5 && y < 8) || (x >= 5 && x < 8 && y >= 5 && y < 15) { 200.0 } else { 10.0 }
        })
        .unwrap();
        let fv = mor_descriptor(&img);
        assert_eq!(fv.values[0], 1.0);
        assert!(fv.values[7] < 1.0 && fv.values[7] > 0.5);
        assert!(fv.values[8] < 1.0);
    }
}
