//! Soft-margin SVM trained by sequential minimal optimization with
//! second-order working-set selection, and one-vs-all multiclass models.

use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, Standardizer};
use super::scores::ScoreMatrix;
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoOptions {
    pub c: f64,
    /// Stop when the maximal KKT violation `m(a) - M(a)` falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SmoOptions {
    fn default() -> Self {
        Self {
            c: 100.0,
            tolerance: 1e-3,
            max_iterations: 10_000_000,
        }
    }
}

/// Dual solution of one binary problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Decision function is `sum_i alpha_i y_i K(x_i, x) - rho`.
    pub rho: f64,
    pub objective: f64,
    pub iterations: usize,
    /// Final `m(a) - M(a)`.
    pub gap: f64,
}

fn is_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn is_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// Solves `min 1/2 a^T Q a - e^T a`, `0 <= a <= C`, `y^T a = 0`, with
/// `Q_ij = y_i y_j K_ij` and `K` a precomputed row-major Gram matrix.
pub fn smo_solve(gram: &[f64], y: &[f64], opts: &SmoOptions) -> Result<SmoSolution> {
    let n = y.len();
    if gram.len() != n * n {
        return Err(Error::Mismatch("Gram matrix size does not match labels".into()));
    }
    if !(opts.c > 0.0) {
        return Err(Error::InvalidInput(format!("C must be positive, got {}", opts.c)));
    }
    let c = opts.c;
    let k = |i: usize, j: usize| gram[i * n + j];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;
    let mut gap;
    loop {
        // i: maximal violating index from I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if is_up(y[t], alpha[t], c) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = t;
                }
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !is_low(y[t], alpha[t], c) {
                continue;
            }
            let v = -y[t] * grad[t];
            if v < gmin {
                gmin = v;
            }
            if i_sel != usize::MAX && v < gmax {
                let b = gmax - v;
                let mut a = k(i_sel, i_sel) + k(t, t) - 2.0 * k(i_sel, t);
                if a <= 0.0 {
                    a = TAU;
                }
                let score = -(b * b) / a;
                if score < best {
                    best = score;
                    j_sel = t;
                }
            }
        }
        gap = gmax - gmin;
        if i_sel == usize::MAX || j_sel == usize::MAX || gap < opts.tolerance {
            break;
        }
        if iterations >= opts.max_iterations {
            return Err(Error::Numerical(format!(
                "SMO did not converge in {} iterations (gap {gap:.3e})",
                opts.max_iterations
            )));
        }
        iterations += 1;
        let (i, j) = (i_sel, j_sel);
        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let mut quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 && alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = diff;
            } else if diff <= 0.0 && alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 && alpha[i] > c {
                alpha[i] = c;
                alpha[j] = c - diff;
            } else if diff <= 0.0 && alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c && alpha[i] > c {
                alpha[i] = c;
                alpha[j] = sum - c;
            } else if sum <= c && alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c && alpha[j] > c {
                alpha[j] = c;
                alpha[i] = sum - c;
            } else if sum <= c && alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (dai, daj) = (alpha[i] - old_ai, alpha[j] - old_aj);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k(t, i) * dai + y[j] * k(t, j) * daj);
        }
    }
    // rho from free vectors, else the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else if lb.is_finite() {
        lb
    } else {
        0.0
    };
    let objective = dual_objective(gram, y, &alpha);
    Ok(SmoSolution {
        alpha,
        rho,
        objective,
        iterations,
        gap,
    })
}

/// `1/2 a^T Q a - sum a`.
pub fn dual_objective(gram: &[f64], y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[i * n + j];
        }
    }
    0.5 * quad - alpha.iter().sum::<f64>()
}

/// Kernel choice and solver settings for one descriptor family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub kernel: Kernel,
    pub smo: SmoOptions,
    /// Z-score every dimension on the training set first.
    pub standardize: bool,
}

impl SvmParams {
    pub fn histogram() -> Self {
        Self {
            kernel: Kernel::Intersection,
            smo: SmoOptions::default(),
            standardize: false,
        }
    }

    pub fn statistics() -> Self {
        Self {
            kernel: Kernel::Linear,
            smo: SmoOptions::default(),
            standardize: true,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{};C={};tol={};std={}",
            self.kernel.name(),
            self.smo.c,
            self.smo.tolerance,
            self.standardize
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    /// Indices into the model's support vector list.
    pub support: Vec<usize>,
    /// `alpha_i y_i` for each support index.
    pub coef: Vec<f64>,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub classes: Vec<String>,
    pub kernel: Kernel,
    pub c: f64,
    pub standardizer: Option<Standardizer>,
    /// Every training vector with a nonzero coefficient in some class model.
    pub vectors: Vec<Vec<f64>>,
    pub models: Vec<BinaryModel>,
}

fn check_dims(features: &[&[f64]]) -> Result<usize> {
    let d = features.first().map(|f| f.len()).unwrap_or(0);
    if let Some(i) = features.iter().position(|f| f.len() != d) {
        return Err(Error::Mismatch(format!(
            "feature vector {i} has length {}, expected {d}",
            features[i].len()
        )));
    }
    Ok(d)
}

/// One-vs-all training: one binary problem per class, target against the rest.
pub fn train_ova_svm(features: &[&[f64]], labels: &[usize], classes: &[String], params: &SvmParams) -> Result<SvmModel> {
    if features.len() != labels.len() {
        return Err(Error::Mismatch("feature and label counts differ".into()));
    }
    if classes.len() < 2 {
        return Err(Error::InvalidInput("SVM needs at least 2 classes".into()));
    }
    if let Some(&l) = labels.iter().find(|&&l| l >= classes.len()) {
        return Err(Error::InvalidInput(format!("label index {l} out of range")));
    }
    let distinct = labels.iter().collect::<std::collections::BTreeSet<_>>().len();
    if distinct < 2 {
        return Err(Error::InvalidInput("training labels contain a single class".into()));
    }
    check_dims(features)?;
    let standardizer = params.standardize.then(|| Standardizer::fit(features));
    let owned: Vec<Vec<f64>> = match &standardizer {
        Some(s) => features.iter().map(|f| s.apply(f)).collect(),
        None => features.iter().map(|f| f.to_vec()).collect(),
    };
    let xs: Vec<&[f64]> = owned.iter().map(|v| v.as_slice()).collect();
    let gram = params.kernel.gram(&xs);
    let mut used = vec![usize::MAX; xs.len()];
    let mut vectors = Vec::new();
    let mut models = Vec::with_capacity(classes.len());
    for class in 0..classes.len() {
        let y: Vec<f64> = labels.iter().map(|&l| if l == class { 1.0 } else { -1.0 }).collect();
        let sol = smo_solve(&gram, &y, &params.smo)?;
        let mut support = Vec::new();
        let mut coef = Vec::new();
        for (t, &a) in sol.alpha.iter().enumerate() {
            if a > 0.0 {
                if used[t] == usize::MAX {
                    used[t] = vectors.len();
                    vectors.push(owned[t].clone());
                }
                support.push(used[t]);
                coef.push(a * y[t]);
            }
        }
        models.push(BinaryModel {
            support,
            coef,
            rho: sol.rho,
        });
    }
    Ok(SvmModel {
        classes: classes.to_vec(),
        kernel: params.kernel,
        c: params.smo.c,
        standardizer,
        vectors,
        models,
    })
}

impl SvmModel {
    /// Decision values of every class model on one vector.
    pub fn decision(&self, x: &[f64]) -> Vec<f64> {
        let x = match &self.standardizer {
            Some(s) => s.apply(x),
            None => x.to_vec(),
        };
        let kv: Vec<f64> = self.vectors.iter().map(|v| self.kernel.eval(v, &x)).collect();
        self.models
            .iter()
            .map(|m| m.support.iter().zip(&m.coef).map(|(&s, c)| c * kv[s]).sum::<f64>() - m.rho)
            .collect()
    }

    /// Score matrix of the given samples (rows in the given order).
    pub fn score_samples(&self, ids: &[String], features: &[&[f64]]) -> Result<ScoreMatrix> {
        if ids.len() != features.len() {
            return Err(Error::Mismatch("id and feature counts differ".into()));
        }
        let d = self.standardizer.as_ref().map(|s| s.mean.len()).or_else(|| self.vectors.first().map(|v| v.len()));
        if let (Some(d), Some(f)) = (d, features.iter().find(|f| Some(f.len()) != d)) {
            return Err(Error::Mismatch(format!("feature length {} does not match model length {d}", f.len())));
        }
        let mut values = Vec::with_capacity(ids.len() * self.classes.len());
        for f in features {
            values.extend(self.decision(f));
        }
        ScoreMatrix::new(ids.to_vec(), self.classes.clone(), values)
    }
}
