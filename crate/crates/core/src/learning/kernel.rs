//! Kernels and per-dimension standardization.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    /// `sum_i min(a_i, b_i)`.
    Intersection,
    Linear,
    /// `exp(-gamma |a - b|^2)`.
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Intersection => a.iter().zip(b).map(|(x, y)| x.min(*y)).sum(),
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Kernel::Intersection => "intersection".into(),
            Kernel::Linear => "linear".into(),
            Kernel::Rbf { gamma } => format!("rbf(gamma={gamma})"),
        }
    }

    /// Full symmetric Gram matrix, row-major.
    pub fn gram(&self, xs: &[&[f64]]) -> Vec<f64> {
        let n = xs.len();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.eval(xs[i], xs[j]);
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        g
    }
}

/// Per-dimension z-scoring fitted on training vectors. Constant dimensions
/// are only centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(xs: &[&[f64]]) -> Self {
        let d = xs.first().map(|x| x.len()).unwrap_or(0);
        let n = xs.len() as f64;
        let mut mean = vec![0.0; d];
        for x in xs {
            for (m, v) in mean.iter_mut().zip(x.iter()) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; d];
        for x in xs {
            for ((s, v), m) in scale.iter_mut().zip(x.iter()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in scale.iter_mut() {
            let sd = if n > 1.0 { (*s / (n - 1.0)).sqrt() } else { 0.0 };
            *s = if sd > 0.0 { sd } else { 1.0 };
        }
        Self { mean, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}
