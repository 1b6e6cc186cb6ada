//! Reference implementations written directly from the defining formulas,
//! shared by the oracle and acceptance suites.

#![allow(dead_code)]

use std::f64::consts::PI;

use bioens::GrayImage;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Continuous random values, so interpolated comparisons never tie.
pub fn random_image(w: usize, h: usize, rng: &mut impl Rng) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.gen_range(0.0..255.0)).unwrap()
}

pub fn random_integer_image(w: usize, h: usize, rng: &mut impl Rng) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.gen_range(0..256) as f64).unwrap()
}

fn bilinear(img: &GrayImage, x: f64, y: f64) -> f64 {
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let at = |xi: f64, yi: f64| {
        let xi = (xi as usize).min(img.width() - 1);
        let yi = (yi as usize).min(img.height() - 1);
        img.get(xi, yi)
    };
    (1.0 - fx) * (1.0 - fy) * at(x0, y0)
        + fx * (1.0 - fy) * at(x0 + 1.0, y0)
        + (1.0 - fx) * fy * at(x0, y0 + 1.0)
        + fx * fy * at(x0 + 1.0, y0 + 1.0)
}

fn round_if_close(v: f64) -> f64 {
    if (v - v.round()).abs() < 1e-9 {
        v.round()
    } else {
        v
    }
}

/// Neighbor differences `g_p - g_c` at every pixel at least `ceil(r)` from the border.
pub fn neighbor_diffs(img: &GrayImage, r: f64, p: usize) -> Vec<Vec<f64>> {
    let b = r.ceil() as usize;
    let mut out = Vec::new();
    for y in b..img.height() - b {
        for x in b..img.width() - b {
            let c = img.get(x, y);
            let d = (0..p)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / p as f64;
                    let sx = x as f64 + round_if_close(r * t.cos());
                    let sy = y as f64 + round_if_close(r * t.sin());
                    bilinear(img, sx, sy) - c
                })
                .collect();
            out.push(d);
        }
    }
    out
}

pub fn lbp_codes(img: &GrayImage, r: f64, p: usize) -> Vec<u32> {
    neighbor_diffs(img, r, p)
        .iter()
        .map(|d| (0..p).filter(|&k| d[k] >= 0.0).map(|k| 1u32 << k).sum())
        .collect()
}

/// Rotation-invariant uniform label: number of ones when there are at most
/// two circular transitions, `p + 1` otherwise.
pub fn riu2(code: u32, p: usize) -> usize {
    let bit = |k: usize| (code >> (k % p)) & 1;
    let transitions = (0..p).filter(|&k| bit(k) != bit(k + 1)).count();
    if transitions <= 2 {
        code.count_ones() as usize
    } else {
        p + 1
    }
}

pub fn clbp_histogram(img: &GrayImage, r: f64, p: usize) -> Vec<f64> {
    let diffs = neighbor_diffs(img, r, p);
    let all: Vec<f64> = diffs.iter().flatten().map(|d| d.abs()).collect();
    let mean_mag = all.iter().sum::<f64>() / all.len() as f64;
    let img_mean = img.data().iter().sum::<f64>() / img.data().len() as f64;
    let b = r.ceil() as usize;
    let nb = p + 2;
    let mut hist = vec![0.0; nb * nb * 2];
    let mut i = 0;
    for y in b..img.height() - b {
        for x in b..img.width() - b {
            let d = &diffs[i];
            let s: u32 = (0..p).filter(|&k| d[k] >= 0.0).map(|k| 1u32 << k).sum();
            let m: u32 = (0..p).filter(|&k| d[k].abs() >= mean_mag).map(|k| 1u32 << k).sum();
            let c = (img.get(x, y) >= img_mean) as usize;
            hist[(riu2(s, p) * nb + riu2(m, p)) * 2 + c] += 1.0;
            i += 1;
        }
    }
    let n = diffs.len() as f64;
    hist.iter().map(|v| v / n).collect()
}

pub fn bsif_histogram(img: &GrayImage, filters: &[Vec<f64>], l: usize, th: f64) -> Vec<f64> {
    let mut hist = vec![0.0; 1 << filters.len()];
    let mut n = 0.0;
    for y in 0..=img.height() - l {
        for x in 0..=img.width() - l {
            let mut code = 0;
            for (i, f) in filters.iter().enumerate() {
                let mut r = 0.0;
                for v in 0..l {
                    for u in 0..l {
                        r += f[v * l + u] * img.get(x + u, y + v);
                    }
                }
                if r > th {
                    code |= 1 << i;
                }
            }
            hist[code] += 1.0;
            n += 1.0;
        }
    }
    hist.iter().map(|v| v / n).collect()
}

/// Direct windowed correlation with each 2-D kernel, whitening, sign codes.
pub fn lpq_histogram(img: &GrayImage, kernels: &[Vec<f64>], whitening: &[[f64; 8]; 8], window: usize) -> Vec<f64> {
    let mut hist = vec![0.0; 256];
    let mut n = 0.0;
    for y in 0..=img.height() - window {
        for x in 0..=img.width() - window {
            let raw: Vec<f64> = kernels
                .iter()
                .map(|k| {
                    let mut s = 0.0;
                    for v in 0..window {
                        for u in 0..window {
                            s += k[v * window + u] * img.get(x + u, y + v);
                        }
                    }
                    s
                })
                .collect();
            let mut code = 0;
            for (i, row) in whitening.iter().enumerate() {
                let z: f64 = row.iter().zip(&raw).map(|(a, b)| a * b).sum();
                if z >= 0.0 {
                    code |= 1 << i;
                }
            }
            hist[code] += 1.0;
            n += 1.0;
        }
    }
    hist.iter().map(|v| v / n).collect()
}

pub fn dct2_double_sum(m: &[f64], n: usize) -> Vec<f64> {
    let a = |k: usize| if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
    let mut out = vec![0.0; n * n];
    for k in 0..n {
        for l in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += m[i * n + j]
                        * (PI * (2 * i + 1) as f64 * k as f64 / (2.0 * n as f64)).cos()
                        * (PI * (2 * j + 1) as f64 * l as f64 / (2.0 * n as f64)).cos();
                }
            }
            out[k * n + l] = a(k) * a(l) * s;
        }
    }
    out
}

/// Two-sided signed-rank p-value by enumerating all `2^n` sign patterns.
pub fn wilcoxon_enumerated(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return 1.0;
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks: Vec<f64> = abs
        .iter()
        .map(|v| {
            let below = abs.iter().filter(|w| *w < v).count() as f64;
            let equal = abs.iter().filter(|w| *w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = (0..n).filter(|&i| d[i] > 0.0).map(|i| ranks[i]).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..1 << n {
        let w: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (2.0 * le.min(ge) as f64 / total).min(1.0)
}

fn qp_objective(q: &[f64], a: &[f64]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a[i] * q[i * n + j] * a[j];
        }
    }
    0.5 * s - a.iter().sum::<f64>()
}

/// Euclidean projection onto `{0 <= a <= c, y.a = 0}` by bisection on the multiplier.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lam: f64| -> Vec<f64> { v.iter().zip(y).map(|(vi, yi)| (vi - lam * yi).clamp(0.0, c)).collect() };
    let g = |lam: f64| -> f64 { at(lam).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    let span = v.iter().map(|x| x.abs()).fold(0.0, f64::max) + c + 1.0;
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Minimum of `1/2 a'Qa - e'a` over `0 <= a <= c`, `y'a = 0`, with
/// `Q_ij = y_i y_j K_ij`: accelerated projected gradient, then an
/// equality-constrained Newton step on the free set.
pub fn qp_minimum(gram: &[f64], y: &[f64], c: f64) -> f64 {
    let n = y.len();
    let q: Vec<f64> = (0..n * n).map(|e| y[e / n] * y[e % n] * gram[e]).collect();
    let lip = (0..n).map(|i| (0..n).map(|j| q[i * n + j].abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / lip;
    let grad = |a: &[f64]| -> Vec<f64> { (0..n).map(|i| (0..n).map(|j| q[i * n + j] * a[j]).sum::<f64>() - 1.0).collect() };
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    for _ in 0..100_000 {
        let g = grad(&z);
        let next = project(&z.iter().zip(&g).map(|(zi, gi)| zi - step * gi).collect::<Vec<_>>(), y, c);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = next.iter().zip(&a).map(|(x, xo)| x + (t - 1.0) / t_next * (x - xo)).collect();
        a = next;
        t = t_next;
    }
    let mut best = qp_objective(&q, &a);

    let eps = 1e-6 * c;
    let free: Vec<usize> = (0..n).filter(|&i| a[i] > eps && a[i] < c - eps).collect();
    let fixed: Vec<f64> = (0..n).map(|i| if a[i] >= c - eps { c } else { 0.0 }).collect();
    let m = free.len();
    if m > 0 {
        let mut kkt = nalgebra::DMatrix::<f64>::zeros(m + 1, m + 1);
        let mut rhs = nalgebra::DVector::<f64>::zeros(m + 1);
        for (r, &i) in free.iter().enumerate() {
            for (s, &j) in free.iter().enumerate() {
                kkt[(r, s)] = q[i * n + j];
            }
            kkt[(r, m)] = y[i];
            kkt[(m, r)] = y[i];
            let bound: f64 = (0..n).filter(|j| !free.contains(j)).map(|j| q[i * n + j] * fixed[j]).sum();
            rhs[r] = 1.0 - bound;
        }
        rhs[m] = -(0..n).filter(|j| !free.contains(j)).map(|j| y[j] * fixed[j]).sum::<f64>();
        if let Some(sol) = kkt.lu().solve(&rhs) {
            let mut polished = fixed.clone();
            for (r, &i) in free.iter().enumerate() {
                polished[i] = sol[r];
            }
            let feasible = polished.iter().all(|&v| (-1e-9..=c + 1e-9).contains(&v))
                && polished.iter().zip(y).map(|(v, yi)| v * yi).sum::<f64>().abs() < 1e-9;
            if feasible {
                best = best.min(qp_objective(&q, &polished));
            }
        }
    }
    best
}
