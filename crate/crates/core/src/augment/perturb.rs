//! Coefficient perturbations: zeroing, additive noise and same-class swapping.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    One,
    Two,
    Three,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::One, Method::Two, Method::Three];

    pub fn name(self) -> &'static str {
        match self {
            Method::One => "one",
            Method::Two => "two",
            Method::Three => "three",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "one" | "1" => Ok(Method::One),
            "two" | "2" => Ok(Method::Two),
            "three" | "3" => Ok(Method::Three),
            _ => Err(Error::InvalidInput(format!("unknown perturbation method {s:?}; valid: one, two, three"))),
        }
    }
}

/// Noise distribution of the additive method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NoiseKind {
    /// `z ~ U(-1/2, 1/2)`.
    #[default]
    Uniform,
    /// `z ~ N(0, 1)`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbParams {
    pub zero_probability: f64,
    pub swap_probability: f64,
    pub donors: usize,
    pub noise: NoiseKind,
}

impl Default for PerturbParams {
    fn default() -> Self {
        Self {
            zero_probability: 0.5,
            swap_probability: 0.05,
            donors: 5,
            noise: NoiseKind::Uniform,
        }
    }
}

impl PerturbParams {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("zero", self.zero_probability), ("swap", self.swap_probability)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!("{name} probability {p} outside [0, 1]")));
            }
        }
        if self.donors == 0 {
            return Err(Error::InvalidInput("donor count must be positive".into()));
        }
        Ok(())
    }
}

/// Positions `0..protected` are never touched and consume no randomness.
pub fn perturb_zero<R: Rng>(coeffs: &mut [f64], p: f64, protected: usize, rng: &mut R) {
    for c in coeffs.iter_mut().skip(protected) {
        if rng.gen::<f64>() < p {
            *c = 0.0;
        }
    }
}

/// Adds `(sigma_img / 2) z` to every unprotected coefficient.
pub fn perturb_noise<R: Rng>(coeffs: &mut [f64], sigma_img: f64, kind: NoiseKind, protected: usize, rng: &mut R) {
    let scale = sigma_img / 2.0;
    for c in coeffs.iter_mut().skip(protected) {
        let z = match kind {
            NoiseKind::Uniform => rng.gen::<f64>() - 0.5,
            NoiseKind::Gaussian => rng.sample::<f64, _>(StandardNormal),
        };
        *c += scale * z;
    }
}

/// Donors in order; for each donor and position, the value is overwritten
/// by the donor's with probability `p`.
pub fn perturb_swap<R: Rng>(
    coeffs: &mut [f64],
    donors: &[&[f64]],
    p: f64,
    protected: usize,
    rng: &mut R,
) -> Result<()> {
    if let Some(d) = donors.iter().find(|d| d.len() != coeffs.len()) {
        return Err(Error::Mismatch(format!(
            "donor has {} coefficients, expected {}",
            d.len(),
            coeffs.len()
        )));
    }
    for donor in donors {
        for (c, &v) in coeffs.iter_mut().zip(donor.iter()).skip(protected) {
            if rng.gen::<f64>() < p {
                *c = v;
            }
        }
    }
    Ok(())
}

/// Picks `count` indices from `pool`, without replacement while the pool lasts.
pub fn pick_donors<R: Rng>(pool: &[usize], count: usize, rng: &mut R) -> Vec<usize> {
    if pool.is_empty() {
        return Vec::new();
    }
    if pool.len() >= count {
        rand::seq::index::sample(rng, pool.len(), count)
            .into_iter()
            .map(|i| pool[i])
            .collect()
    } else {
        (0..count).map(|_| pool[rng.gen_range(0..pool.len())]).collect()
    }
}
