//! Exact dense Gaussian-process regression with the Laplacian kernel
//! `exp(-|x - x'|_1 / L)`.
//!
//! This is the `O(N^3)` baseline the lattice trains are compared against,
//! and the oracle for them: on a full lattice with no noise both give the
//! same posterior mean. Inputs are expected in the normalized units used by
//! [`crate::kernel`].

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal jitter tried once when the kernel matrix fails to factorize.
pub const JITTER: f64 = 1e-10;

pub fn laplacian(x: &[f64], z: &[f64], length_scale: f64) -> f64 {
    let d: f64 = x.iter().zip(z).map(|(a, b)| (a - b).abs()).sum();
    (-d / length_scale).exp()
}

/// A fitted GP. Targets may be standardized internally; predictions are
/// always in the original units.
#[derive(Clone, Debug)]
pub struct GprModel {
    train_x: Vec<Vec<f64>>,
    length_scale: f64,
    noise: f64,
    alpha: DVector<f64>,
    /// `log det(K + noise I + jitter I)`.
    log_det: f64,
    /// Fitted targets after centering and scaling.
    targets: DVector<f64>,
    offset: f64,
    scale: f64,
    jitter: f64,
}

impl GprModel {
    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.train_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_x.is_empty()
    }

    /// Diagonal jitter that was needed to factorize, 0 if none.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }
}

pub fn kernel_matrix(x: &[Vec<f64>], length_scale: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 1.0;
        for j in 0..i {
            let v = laplacian(&x[i], &x[j], length_scale);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

fn fit(x: &[Vec<f64>], y: &[f64], length_scale: f64, noise: f64, offset: f64, scale: f64) -> Result<GprModel> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "{} inputs for {} targets",
            x.len(),
            y.len()
        )));
    }
    let f = x[0].len();
    if x.iter().any(|r| r.len() != f) {
        return Err(Error::Dimension("inputs have differing feature counts".into()));
    }
    if !(length_scale > 0.0) || !(noise >= 0.0) {
        return Err(Error::Domain(format!(
            "length scale {length_scale} and noise {noise} must be positive / nonnegative"
        )));
    }
    let n = x.len();
    // faer's factorization reads only the lower triangle
    let factor = |extra: f64| {
        Mat::<f64>::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1.0 + noise + extra,
            std::cmp::Ordering::Greater => laplacian(&x[i], &x[j], length_scale),
            std::cmp::Ordering::Less => 0.0,
        })
        .llt(Side::Lower)
        .ok()
    };
    let (llt, jitter) = match factor(0.0) {
        Some(c) => (c, 0.0),
        None => (
            factor(JITTER).ok_or_else(|| {
                Error::Numerical(format!(
                    "kernel matrix of {n} points with L = {length_scale} is not positive definite"
                ))
            })?,
            JITTER,
        ),
    };
    let targets = DVector::from_iterator(y.len(), y.iter().map(|v| (v - offset) / scale));
    let rhs = Mat::<f64>::from_fn(n, 1, |i, _| targets[i]);
    let sol = llt.solve(&rhs);
    let alpha = DVector::from_fn(n, |i, _| sol[(i, 0)]);
    let l = llt.L();
    let log_det = 2.0 * (0..n).map(|i| l[(i, i)].ln()).sum::<f64>();
    Ok(GprModel {
        train_x: x.to_vec(),
        length_scale,
        noise,
        alpha,
        log_det,
        targets,
        offset,
        scale,
        jitter,
    })
}

/// Fits `alpha = (K + noise I)^{-1} y` on raw targets.
pub fn gpr_fit(x: &[Vec<f64>], y: &[f64], length_scale: f64, noise: f64) -> Result<GprModel> {
    fit(x, y, length_scale, noise, 0.0, 1.0)
}

/// Fits on targets centered and scaled to unit variance.
pub fn gpr_fit_standardized(x: &[Vec<f64>], y: &[f64], length_scale: f64, noise: f64) -> Result<GprModel> {
    let n = y.len().max(1) as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    fit(x, y, length_scale, noise, mean, if sd > 0.0 { sd } else { 1.0 })
}

/// Posterior mean at `x_star`.
pub fn gpr_predict(model: &GprModel, x_star: &[f64]) -> f64 {
    let kx: f64 = model
        .train_x
        .iter()
        .zip(model.alpha.iter())
        .map(|(x, a)| laplacian(x, x_star, model.length_scale) * a)
        .sum();
    model.offset + model.scale * kx
}

/// Negative log marginal likelihood of the fitted (standardized) targets:
/// `y^T alpha / 2 + log det(K) / 2 + N/2 log(2 pi)`.
pub fn gpr_nlml(model: &GprModel) -> f64 {
    let n = model.targets.len() as f64;
    let log_det = model.log_det;
    0.5 * model.targets.dot(&model.alpha) + 0.5 * log_det + 0.5 * n * (2.0 * std::f64::consts::PI).ln()
}

/// NLML with the signal variance `s2` profiled out: the kernel is
/// `s2 * k_L`, and `s2 = y^T K^{-1} y / N` at its optimum. Returns the
/// NLML and `s2`.
pub fn gpr_nlml_profiled(model: &GprModel) -> (f64, f64) {
    let n = model.targets.len() as f64;
    let log_det = model.log_det;
    let s2 = (model.targets.dot(&model.alpha) / n).max(f64::MIN_POSITIVE);
    let nlml = 0.5 * n * (s2.ln() + 1.0 + (2.0 * std::f64::consts::PI).ln()) + 0.5 * log_det;
    (nlml, s2)
}

/// Treatment of the kernel amplitude during the length-scale search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Amplitude {
    /// Unit prior variance on standardized targets.
    #[default]
    Unit,
    /// Signal variance fitted jointly with `L`, see [`gpr_nlml_profiled`].
    Profiled,
}

/// Outcome of a length-scale grid search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthScaleSearch {
    pub candidates: Vec<f64>,
    /// NLML per candidate; `None` where the fit failed.
    pub nlml: Vec<Option<f64>>,
    pub best: f64,
    /// Whether the largest candidate won.
    pub hit_upper_edge: bool,
}

/// Picks the candidate with the smallest NLML on standardized targets,
/// with unit amplitude.
pub fn select_length_scale(x: &[Vec<f64>], y: &[f64], candidates: &[f64], noise: f64) -> Result<LengthScaleSearch> {
    select_length_scale_with(x, y, candidates, noise, Amplitude::Unit)
}

pub fn select_length_scale_with(
    x: &[Vec<f64>],
    y: &[f64],
    candidates: &[f64],
    noise: f64,
    amplitude: Amplitude,
) -> Result<LengthScaleSearch> {
    if candidates.is_empty() {
        return Err(Error::Domain("no length-scale candidates".into()));
    }
    let nlml: Vec<Option<f64>> = candidates
        .iter()
        .map(|&l| {
            gpr_fit_standardized(x, y, l, noise).ok().map(|m| match amplitude {
                Amplitude::Unit => gpr_nlml(&m),
                Amplitude::Profiled => gpr_nlml_profiled(&m).0,
            })
        })
        .collect();
    let (best_i, _) = nlml
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.filter(|v| v.is_finite()).map(|v| (i, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Numerical("every length-scale candidate failed to fit".into()))?;
    let largest = candidates
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty");
    Ok(LengthScaleSearch {
        candidates: candidates.to_vec(),
        nlml,
        best: candidates[best_i],
        hit_upper_edge: best_i == largest,
    })
}

/// `count` log-spaced values from `lo` to `hi`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
