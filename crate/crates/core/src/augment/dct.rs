//! Orthonormal two-dimensional DCT-II on square matrices stored row-major.

use crate::error::{Error, Result};

/// The `n x n` DCT-II matrix `C`, with `C[k][i] = a_k cos(pi (2i + 1) k / 2n)`,
/// `a_0 = sqrt(1/n)` and `a_k = sqrt(2/n)` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct DctPlan {
    n: usize,
    c: Vec<f64>,
}

impl DctPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("DCT size must be positive".into()));
        }
        let nf = n as f64;
        let mut c = vec![0.0; n * n];
        for k in 0..n {
            let a = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            for i in 0..n {
                let angle = std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf);
                c[k * n + i] = a * angle.cos();
            }
        }
        Ok(Self { n, c })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Row-major `C`.
    pub fn matrix(&self) -> &[f64] {
        &self.c
    }

    fn check(&self, data: &[f64]) -> Result<()> {
        if data.len() != self.n * self.n {
            return Err(Error::InvalidInput(format!(
                "DCT input must be {0}x{0}, got {1} values",
                self.n,
                data.len()
            )));
        }
        Ok(())
    }

    /// `C M C^T`.
    pub fn forward(&self, m: &[f64]) -> Result<Vec<f64>> {
        self.check(m)?;
        let n = self.n;
        // t = C M
        let mut t = vec![0.0; n * n];
        for k in 0..n {
            let row = &mut t[k * n..(k + 1) * n];
            for i in 0..n {
                let ck = self.c[k * n + i];
                let mrow = &m[i * n..(i + 1) * n];
                for j in 0..n {
                    row[j] += ck * mrow[j];
                }
            }
        }
        // out = t C^T
        let mut out = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                let crow = &self.c[l * n..(l + 1) * n];
                out[k * n + l] = t[k * n..(k + 1) * n].iter().zip(crow).map(|(a, b)| a * b).sum();
            }
        }
        Ok(out)
    }

    /// `C^T D C`.
    pub fn inverse(&self, d: &[f64]) -> Result<Vec<f64>> {
        self.check(d)?;
        let n = self.n;
        // t = C^T D
        let mut t = vec![0.0; n * n];
        for k in 0..n {
            let drow = &d[k * n..(k + 1) * n];
            for i in 0..n {
                let ck = self.c[k * n + i];
                let row = &mut t[i * n..(i + 1) * n];
                for j in 0..n {
                    row[j] += ck * drow[j];
                }
            }
        }
        // out = t C
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let trow = &t[i * n..(i + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for (l, &tv) in trow.iter().enumerate() {
                let crow = &self.c[l * n..(l + 1) * n];
                for j in 0..n {
                    orow[j] += tv * crow[j];
                }
            }
        }
        Ok(out)
    }
}

fn side(len: usize) -> Result<usize> {
    let n = (len as f64).sqrt().round() as usize;
    if n == 0 || n * n != len {
        return Err(Error::InvalidInput(format!("DCT input of {len} values is not square")));
    }
    Ok(n)
}

/// Forward transform of a square row-major matrix.
pub fn dct2(m: &[f64]) -> Result<Vec<f64>> {
    DctPlan::new(side(m.len())?)?.forward(m)
}

pub fn idct2(d: &[f64]) -> Result<Vec<f64>> {
    DctPlan::new(side(d.len())?)?.inverse(d)
}
