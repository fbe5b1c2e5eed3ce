//! Reference pricers for basket puts under correlated geometric Brownian
//! motion.
//!
//! - European put on the geometric average: closed form, since a geometric
//!   mean of lognormals is lognormal.
//! - American put on the arithmetic average: Longstaff-Schwartz regression
//!   Monte Carlo.
//! - Single-asset CRR binomial tree and Black-Scholes put, used as oracles.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// A point in pricing space: basket spots, strike, rate and time to
/// maturity in years.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarketPoint {
    pub spots: Vec<f64>,
    pub strike: f64,
    pub rate: f64,
    pub ttm: f64,
}

impl MarketPoint {
    pub fn validate(&self) -> Result<()> {
        if self.spots.is_empty() {
            return Err(Error::Domain("basket has no assets".into()));
        }
        if let Some(s) = self.spots.iter().find(|s| !(**s > 0.0)) {
            return Err(Error::Domain(format!("spot {s} must be positive")));
        }
        if !(self.strike > 0.0) {
            return Err(Error::Domain(format!("strike {} must be positive", self.strike)));
        }
        if !(self.ttm >= 0.0) || !self.rate.is_finite() {
            return Err(Error::Domain(format!(
                "rate {} / maturity {} out of range",
                self.rate, self.ttm
            )));
        }
        Ok(())
    }
}

/// Volatilities, correlation and dividend yields of the basket assets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasketModelParams {
    pub vols: Vec<f64>,
    /// Row-major `n x n` correlation matrix.
    pub correlation: Vec<Vec<f64>>,
    pub dividends: Vec<f64>,
}

impl BasketModelParams {
    /// Equal volatilities, one pairwise correlation, zero dividends.
    pub fn uniform(n: usize, vol: f64, rho: f64) -> Self {
        Self {
            vols: vec![vol; n],
            correlation: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { rho }).collect())
                .collect(),
            dividends: vec![0.0; n],
        }
    }

    /// `σ = 0.2`, `ρ = 0.5`, `q = 0` for every asset.
    pub fn default_for(n: usize) -> Self {
        Self::uniform(n, 0.2, 0.5)
    }

    pub fn num_assets(&self) -> usize {
        self.vols.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.vols.len() != n || self.dividends.len() != n || self.correlation.len() != n {
            return Err(Error::Dimension(format!(
                "model parameters sized for {} assets, basket has {n}",
                self.vols.len()
            )));
        }
        if let Some(v) = self.vols.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("volatility {v} must be nonnegative")));
        }
        for (i, row) in self.correlation.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!("correlation row {i} has {} entries", row.len())));
            }
            if (row[i] - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("correlation diagonal entry {i} is {}", row[i])));
            }
            for (j, &c) in row.iter().enumerate() {
                if (c - self.correlation[j][i]).abs() > 1e-12 || c.abs() > 1.0 + 1e-12 {
                    return Err(Error::Domain(format!("correlation entry ({i}, {j}) = {c} is invalid")));
                }
            }
        }
        Ok(())
    }

    /// `L` with `L L^T = ρ`, from the eigendecomposition so that
    /// semidefinite matrices (e.g. perfect correlation) are accepted.
    pub fn correlation_factor(&self) -> Result<DMatrix<f64>> {
        let n = self.num_assets();
        let rho = DMatrix::from_fn(n, n, |i, j| self.correlation[i][j]);
        let eig = rho.symmetric_eigen();
        let min = eig.eigenvalues.min();
        if min < -1e-10 {
            return Err(Error::Domain(format!(
                "correlation matrix is not positive semidefinite (eigenvalue {min:.3e})"
            )));
        }
        let sqrt = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        Ok(&eig.eigenvectors * DMatrix::from_diagonal(&sqrt))
    }
}

/// Least-squares Monte Carlo settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsmcConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    /// Highest power of the normalized basket average in the regression.
    pub degree: usize,
    pub seed: u64,
}

impl LsmcConfig {
    pub fn new(n_paths: usize, n_steps: usize, seed: u64) -> Self {
        Self {
            n_paths,
            n_steps,
            degree: 3,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 2 || self.n_steps < 1 {
            return Err(Error::Domain(format!(
                "LSMC needs at least 2 paths and 1 step, got {} x {}",
                self.n_paths, self.n_steps
            )));
        }
        Ok(())
    }
}

/// A Monte Carlo price with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub price: f64,
    pub std_error: f64,
}

impl McEstimate {
    fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        Self {
            price: mean,
            std_error: (var / n).sqrt(),
        }
    }
}

/// Black-Scholes European put with continuous dividend yield.
pub fn bs_put(spot: f64, strike: f64, rate: f64, div: f64, vol: f64, ttm: f64) -> f64 {
    let df = (-rate * ttm).exp();
    let fwd = spot * ((rate - div) * ttm).exp();
    black_put(fwd, strike, vol * ttm.sqrt(), df)
}

/// Undiscounted-forward Black put: `df * E[(K - F e^{sZ - s^2/2})^+]`.
fn black_put(fwd: f64, strike: f64, stdev: f64, df: f64) -> f64 {
    if stdev <= 0.0 {
        return df * (strike - fwd).max(0.0);
    }
    let d1 = ((fwd / strike).ln() + 0.5 * stdev * stdev) / stdev;
    let d2 = d1 - stdev;
    df * (strike * norm_cdf(-d2) - fwd * norm_cdf(-d1))
}

/// European put on the geometric average of the basket.
///
/// `ln G_T` is normal with variance `σ_G^2 T`, `σ_G^2 = (1/n^2) Σ σ_i σ_j ρ_ij`,
/// and mean `ln G_0 + (1/n) Σ (r - q_i - σ_i^2/2) T`.
pub fn price_european_geo_basket_put(p: &MarketPoint, m: &BasketModelParams) -> Result<f64> {
    p.validate()?;
    let n = p.spots.len();
    m.validate(n)?;
    let nf = n as f64;
    let log_g0 = p.spots.iter().map(|s| s.ln()).sum::<f64>() / nf;
    let mut var = 0.0;
    for i in 0..n {
        for j in 0..n {
            var += m.vols[i] * m.vols[j] * m.correlation[i][j];
        }
    }
    let var = var / (nf * nf);
    let drift = (0..n)
        .map(|i| p.rate - m.dividends[i] - 0.5 * m.vols[i] * m.vols[i])
        .sum::<f64>()
        / nf;
    let fwd = (log_g0 + (drift + 0.5 * var) * p.ttm).exp();
    Ok(black_put(fwd, p.strike, (var * p.ttm).sqrt(), (-p.rate * p.ttm).exp()))
}

/// Simulated asset paths, laid out `[path][step][asset]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Paths {
    pub n_paths: usize,
    pub n_steps: usize,
    pub n_assets: usize,
    pub data: Vec<f64>,
}

impl Paths {
    pub fn get(&self, path: usize, step: usize, asset: usize) -> f64 {
        self.data[(path * (self.n_steps + 1) + step) * self.n_assets + asset]
    }
}

/// Drives every path simulation: exact lognormal steps with correlated
/// normals, one sequential RNG stream so results depend only on the seed.
struct GbmStepper {
    log_drift: Vec<f64>,
    vol_sqdt: Vec<f64>,
    factor: DMatrix<f64>,
    rng: ChaCha8Rng,
    eps: Vec<f64>,
}

impl GbmStepper {
    fn new(p: &MarketPoint, m: &BasketModelParams, dt: f64, seed: u64) -> Result<Self> {
        p.validate()?;
        m.validate(p.spots.len())?;
        let factor = m.correlation_factor()?;
        let n = p.spots.len();
        Ok(Self {
            log_drift: (0..n)
                .map(|i| (p.rate - m.dividends[i] - 0.5 * m.vols[i] * m.vols[i]) * dt)
                .collect(),
            vol_sqdt: m.vols.iter().map(|v| v * dt.sqrt()).collect(),
            factor,
            rng: ChaCha8Rng::seed_from_u64(seed),
            eps: vec![0.0; n],
        })
    }

    /// Advances `spots` by one step in place.
    fn step(&mut self, spots: &mut [f64]) {
        let n = spots.len();
        for e in &mut self.eps {
            *e = StandardNormal.sample(&mut self.rng);
        }
        for i in 0..n {
            let z: f64 = (0..n).map(|k| self.factor[(i, k)] * self.eps[k]).sum();
            spots[i] *= (self.log_drift[i] + self.vol_sqdt[i] * z).exp();
        }
    }
}

/// Correlated GBM paths on `cfg.n_steps` equal steps up to `p.ttm`.
pub fn simulate_gbm_paths(p: &MarketPoint, m: &BasketModelParams, cfg: &LsmcConfig) -> Result<Paths> {
    cfg.validate()?;
    let dt = p.ttm / cfg.n_steps as f64;
    let mut stepper = GbmStepper::new(p, m, dt, cfg.seed)?;
    let n = p.spots.len();
    let mut data = Vec::with_capacity(cfg.n_paths * (cfg.n_steps + 1) * n);
    let mut s = p.spots.clone();
    for _ in 0..cfg.n_paths {
        s.copy_from_slice(&p.spots);
        data.extend_from_slice(&s);
        for _ in 0..cfg.n_steps {
            stepper.step(&mut s);
            data.extend_from_slice(&s);
        }
    }
    Ok(Paths {
        n_paths: cfg.n_paths,
        n_steps: cfg.n_steps,
        n_assets: n,
        data,
    })
}

/// Basket arithmetic averages `[path][step]`, simulated like
/// [`simulate_gbm_paths`] without storing individual assets.
fn basket_averages(p: &MarketPoint, m: &BasketModelParams, cfg: &LsmcConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let dt = p.ttm / cfg.n_steps as f64;
    let mut stepper = GbmStepper::new(p, m, dt, cfg.seed)?;
    let nf = p.spots.len() as f64;
    let mean = |s: &[f64]| s.iter().sum::<f64>() / nf;
    let mut out = Vec::with_capacity(cfg.n_paths * (cfg.n_steps + 1));
    let mut s = p.spots.clone();
    for _ in 0..cfg.n_paths {
        s.copy_from_slice(&p.spots);
        out.push(mean(&s));
        for _ in 0..cfg.n_steps {
            stepper.step(&mut s);
            out.push(mean(&s));
        }
    }
    Ok(out)
}

/// Least-squares coefficients of `y ~ X beta` through a thin QR; `None`
/// when the design is numerically rank deficient.
fn least_squares(x: DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    let qr = x.qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() <= 1e-12 * scale) {
        return None;
    }
    let rhs = qr.q().transpose() * y;
    r.solve_upper_triangular(&rhs)
}

/// American put on the arithmetic basket average by Longstaff-Schwartz.
///
/// Continuation values are regressed on `1, x, ..., x^degree` with
/// `x = A_t / K` over in-the-money paths. The put payoff itself is not a
/// separate regressor: on in-the-money paths it equals `K (1 - x)` and is
/// already spanned. Exercise at time zero is allowed.
pub fn price_american_arith_basket_put_lsmc(
    p: &MarketPoint,
    m: &BasketModelParams,
    cfg: &LsmcConfig,
) -> Result<McEstimate> {
    let avg = basket_averages(p, m, cfg)?;
    let (np, ns) = (cfg.n_paths, cfg.n_steps);
    let stride = ns + 1;
    let k = p.strike;
    let disc = (-p.rate * p.ttm / ns as f64).exp();
    let payoff = |a: f64| (k - a).max(0.0);

    let mut cash: Vec<f64> = (0..np).map(|i| payoff(avg[i * stride + ns])).collect();
    let nb = cfg.degree + 1;
    for t in (1..ns).rev() {
        cash.iter_mut().for_each(|c| *c *= disc);
        let itm: Vec<usize> = (0..np).filter(|&i| payoff(avg[i * stride + t]) > 0.0).collect();
        if itm.len() <= nb {
            continue;
        }
        let x = DMatrix::from_fn(itm.len(), nb, |r, c| (avg[itm[r] * stride + t] / k).powi(c as i32));
        let y = DVector::from_iterator(itm.len(), itm.iter().map(|&i| cash[i]));
        let Some(beta) = least_squares(x, &y) else {
            log::debug!("LSMC regression at step {t} is rank deficient, continuing all paths");
            continue;
        };
        for &i in &itm {
            let a = avg[i * stride + t];
            let xi = a / k;
            let cont: f64 = beta.iter().rev().fold(0.0, |acc, b| acc * xi + b);
            let ex = payoff(a);
            if ex >= cont {
                cash[i] = ex;
            }
        }
    }
    cash.iter_mut().for_each(|c| *c *= disc);
    let est = McEstimate::from_samples(&cash);
    let now = payoff(avg[0]);
    if now > est.price {
        return Ok(McEstimate {
            price: now,
            std_error: 0.0,
        });
    }
    Ok(est)
}

/// Payoff type for [`price_european_basket_mc`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasketAverage {
    Arithmetic,
    Geometric,
}

/// Monte Carlo European basket put with `cfg.n_steps` simulated steps.
pub fn price_european_basket_mc(
    p: &MarketPoint,
    m: &BasketModelParams,
    cfg: &LsmcConfig,
    kind: BasketAverage,
) -> Result<McEstimate> {
    cfg.validate()?;
    let df = (-p.rate * p.ttm).exp();
    let samples = match kind {
        BasketAverage::Arithmetic => {
            let avg = basket_averages(p, m, cfg)?;
            let stride = cfg.n_steps + 1;
            (0..cfg.n_paths)
                .map(|i| df * (p.strike - avg[i * stride + cfg.n_steps]).max(0.0))
                .collect::<Vec<_>>()
        }
        BasketAverage::Geometric => {
            let paths = simulate_gbm_paths(p, m, cfg)?;
            let nf = paths.n_assets as f64;
            (0..cfg.n_paths)
                .map(|i| {
                    let lg = (0..paths.n_assets).map(|a| paths.get(i, cfg.n_steps, a).ln()).sum::<f64>() / nf;
                    df * (p.strike - lg.exp()).max(0.0)
                })
                .collect()
        }
    };
    Ok(McEstimate::from_samples(&samples))
}

/// One-step Monte Carlo of the geometric European put spread over the
/// rayon pool in fixed chunks, so the result depends only on `seed`.
pub fn price_european_geo_basket_put_mc(
    p: &MarketPoint,
    m: &BasketModelParams,
    n_paths: usize,
    seed: u64,
) -> Result<McEstimate> {
    const CHUNK: usize = 1 << 14;
    p.validate()?;
    m.validate(p.spots.len())?;
    let chunks = n_paths.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n_paths - c * CHUNK);
            let cfg = LsmcConfig::new(len.max(2), 1, point_seed(seed, &[c]));
            let est = price_european_basket_mc(p, m, &cfg, BasketAverage::Geometric)?;
            Ok(vec![est.price, est.std_error, len as f64])
        })
        .collect::<Result<_>>()?;
    // recombine chunk means and variances
    let total: f64 = parts.iter().map(|v| v[2]).sum();
    let mean = parts.iter().map(|v| v[0] * v[2]).sum::<f64>() / total;
    let second: f64 = parts
        .iter()
        .map(|v| {
            let var = v[1] * v[1] * v[2];
            (var * (v[2] - 1.0) + v[2] * v[0] * v[0]) / total
        })
        .sum();
    let var = (second - mean * mean).max(0.0) * total / (total - 1.0);
    Ok(McEstimate {
        price: mean,
        std_error: (var / total).sqrt(),
    })
}

/// Cox-Ross-Rubinstein tree for a single-asset American put.
pub fn binomial_tree_american_put(
    spot: f64,
    strike: f64,
    rate: f64,
    div: f64,
    vol: f64,
    ttm: f64,
    steps: usize,
) -> f64 {
    if ttm <= 0.0 || steps == 0 {
        return (strike - spot).max(0.0);
    }
    let dt = ttm / steps as f64;
    let disc = (-rate * dt).exp();
    let growth = ((rate - div) * dt).exp();
    let (u, d, pu) = if vol > 0.0 {
        let u = (vol * dt.sqrt()).exp();
        let d = 1.0 / u;
        (u, d, ((growth - d) / (u - d)).clamp(0.0, 1.0))
    } else {
        (growth, growth, 1.0)
    };
    let mut values: Vec<f64> = (0..=steps)
        .map(|j| (strike - spot * u.powi(j as i32) * d.powi((steps - j) as i32)).max(0.0))
        .collect();
    for n in (0..steps).rev() {
        for j in 0..=n {
            let cont = disc * (pu * values[j + 1] + (1.0 - pu) * values[j]);
            let s = spot * u.powi(j as i32) * d.powi((n - j) as i32);
            values[j] = cont.max(strike - s);
        }
    }
    values[0]
}

/// Deterministic per-index seed (splitmix64 over the index digits), so a
/// stochastic pricer is a fixed function of the grid point.
pub fn point_seed(seed: u64, idx: &[usize]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    idx.iter().fold(mix(seed), |h, &i| mix(h ^ i as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn point(spots: &[f64], strike: f64, rate: f64, ttm: f64) -> MarketPoint {
        MarketPoint {
            spots: spots.to_vec(),
            strike,
            rate,
            ttm,
        }
    }

    #[test]
    fn geometric_put_at_expiry_is_payoff() {
        let m = BasketModelParams::default_for(2);
        let p = point(&[80.0, 125.0], 110.0, 0.03, 0.0);
        let g0 = (80.0f64 * 125.0).sqrt();
        assert!((price_european_geo_basket_put(&p, &m).unwrap() - (110.0 - g0)).abs() < 1e-12);
        let p = point(&[80.0, 125.0], 110.0, 0.03, 1e-12);
        assert!((price_european_geo_basket_put(&p, &m).unwrap() - (110.0 - g0)).abs() < 1e-6);
    }

    #[test]
    fn geometric_put_without_volatility() {
        let mut m = BasketModelParams::uniform(3, 0.0, 0.3);
        m.dividends = vec![0.01, 0.02, 0.0];
        let p = point(&[50.0, 60.0, 70.0], 70.0, 0.04, 2.0);
        let g0 = (50.0f64 * 60.0 * 70.0).cbrt();
        let drift = (0.03 + 0.02 + 0.04) / 3.0;
        let want = (-0.04f64 * 2.0).exp() * (70.0 - g0 * (drift * 2.0f64).exp()).max(0.0);
        assert!((price_european_geo_basket_put(&p, &m).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn single_asset_geometric_is_black_scholes() {
        let m = BasketModelParams::uniform(1, 0.25, 0.0);
        let p = point(&[100.0], 95.0, 0.05, 0.7);
        let got = price_european_geo_basket_put(&p, &m).unwrap();
        assert!((got - bs_put(100.0, 95.0, 0.05, 0.0, 0.25, 0.7)).abs() < 1e-12);
        // put-call parity on the BS formula
        let call = bs_put(100.0, 95.0, 0.05, 0.0, 0.25, 0.7) + 100.0 - 95.0 * (-0.05f64 * 0.7).exp();
        assert!(call > 0.0);
    }

    #[test]
    fn geometric_put_matches_monte_carlo() {
        let m = BasketModelParams::default_for(5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for t in 0..3 {
            let spots: Vec<f64> = (0..5).map(|_| rng.random_range(5.0..150.0)).collect();
            let p = point(&spots, rng.random_range(1.0..200.0), rng.random_range(0.005..0.08), rng.random_range(0.1..3.0));
            let exact = price_european_geo_basket_put(&p, &m).unwrap();
            let mc = price_european_geo_basket_put_mc(&p, &m, 200_000, t).unwrap();
            assert!((mc.price - exact).abs() <= 3.0 * mc.std_error.max(1e-12), "{exact} vs {mc:?}");
        }
    }

    #[test]
    fn zero_vol_paths_are_deterministic() {
        let mut m = BasketModelParams::uniform(2, 0.0, 0.5);
        m.dividends = vec![0.01, 0.03];
        let p = point(&[10.0, 20.0], 15.0, 0.05, 1.5);
        let paths = simulate_gbm_paths(&p, &m, &LsmcConfig::new(3, 4, 1)).unwrap();
        for path in 0..3 {
            for step in 0..=4 {
                let t = 1.5 * step as f64 / 4.0;
                for (a, q) in [0.01, 0.03].iter().enumerate() {
                    let want = p.spots[a] * ((0.05 - q) * t).exp();
                    assert!((paths.get(path, step, a) - want).abs() < 1e-12 * want);
                }
            }
        }
    }

    #[test]
    fn paths_are_martingales_and_seeded() {
        let m = BasketModelParams::default_for(2);
        let p = point(&[100.0, 40.0], 100.0, 0.03, 1.0);
        let cfg = LsmcConfig::new(100_000, 2, 7);
        let paths = simulate_gbm_paths(&p, &m, &cfg).unwrap();
        for a in 0..2 {
            let xs: Vec<f64> = (0..cfg.n_paths).map(|i| (-0.03f64).exp() * paths.get(i, 2, a)).collect();
            let est = McEstimate::from_samples(&xs);
            assert!((est.price - p.spots[a]).abs() <= 3.0 * est.std_error);
        }
        let again = simulate_gbm_paths(&p, &m, &LsmcConfig::new(100, 2, 7)).unwrap();
        let first = simulate_gbm_paths(&p, &m, &LsmcConfig::new(100, 2, 7)).unwrap();
        assert_eq!(again, first);
    }

    #[test]
    fn rejects_bad_correlation() {
        let mut m = BasketModelParams::uniform(3, 0.2, 0.0);
        m.correlation = vec![vec![1.0, 0.9, -0.9], vec![0.9, 1.0, 0.9], vec![-0.9, 0.9, 1.0]];
        assert!(matches!(m.correlation_factor(), Err(Error::Domain(_))));
        let p = point(&[1.0, 1.0, 1.0], 1.0, 0.0, 1.0);
        assert!(simulate_gbm_paths(&p, &m, &LsmcConfig::new(10, 2, 0)).is_err());
        let perfect = BasketModelParams::uniform(3, 0.2, 1.0);
        let l = perfect.correlation_factor().unwrap();
        assert!((&l * l.transpose() - DMatrix::from_element(3, 3, 1.0)).abs().max() < 1e-12);
    }

    #[test]
    fn one_step_lsmc_is_european() {
        let m = BasketModelParams::default_for(2);
        let p = point(&[95.0, 105.0], 101.0, 0.05, 1.0 / 365.0);
        let cfg = LsmcConfig::new(50_000, 1, 3);
        let am = price_american_arith_basket_put_lsmc(&p, &m, &cfg).unwrap();
        let eu = price_european_basket_mc(&p, &m, &cfg, BasketAverage::Arithmetic).unwrap();
        assert!((am.price - eu.price).abs() <= 3.0 * eu.std_error + 1e-12);
    }

    #[test]
    fn american_dominates_european() {
        let m = BasketModelParams::default_for(2);
        let p = point(&[90.0, 100.0], 110.0, 0.06, 1.0);
        let cfg = LsmcConfig::new(20_000, 30, 4);
        let am = price_american_arith_basket_put_lsmc(&p, &m, &cfg).unwrap();
        let eu = price_european_basket_mc(&p, &m, &cfg, BasketAverage::Arithmetic).unwrap();
        assert!(am.price >= eu.price - 2.0 * eu.std_error);
        assert!(am.price <= p.strike);
    }

    #[test]
    fn lsmc_is_seed_deterministic() {
        let m = BasketModelParams::default_for(2);
        let p = point(&[90.0, 100.0], 100.0, 0.02, 0.5);
        let cfg = LsmcConfig::new(500, 10, 11);
        let a = price_american_arith_basket_put_lsmc(&p, &m, &cfg).unwrap();
        let b = price_american_arith_basket_put_lsmc(&p, &m, &cfg).unwrap();
        assert_eq!(a.price.to_bits(), b.price.to_bits());
    }

    #[test]
    fn deep_itm_exercises_immediately() {
        let m = BasketModelParams::default_for(2);
        let p = point(&[5.0, 5.0], 200.0, 0.08, 3.0);
        let est = price_american_arith_basket_put_lsmc(&p, &m, &LsmcConfig::new(2000, 30, 1)).unwrap();
        assert_eq!(est.price, 195.0);
    }

    #[test]
    fn lsmc_without_itm_paths_is_zero() {
        let m = BasketModelParams::uniform(2, 0.01, 0.5);
        let p = point(&[150.0, 150.0], 1.0, 0.02, 0.1);
        let est = price_american_arith_basket_put_lsmc(&p, &m, &LsmcConfig::new(100, 5, 1)).unwrap();
        assert_eq!(est.price, 0.0);
    }

    #[test]
    fn binomial_tree_behaviour() {
        assert_eq!(binomial_tree_american_put(90.0, 100.0, 0.05, 0.0, 0.2, 0.0, 100), 10.0);
        let am = binomial_tree_american_put(100.0, 100.0, 0.05, 0.0, 0.2, 1.0, 1000);
        let am2 = binomial_tree_american_put(100.0, 100.0, 0.05, 0.0, 0.2, 1.0, 2000);
        assert!((am - am2).abs() < 1e-3);
        assert!(am >= bs_put(100.0, 100.0, 0.05, 0.0, 0.2, 1.0));
        // converges towards the European value when r = 0
        let eu = bs_put(100.0, 100.0, 0.0, 0.0, 0.2, 1.0);
        assert!((binomial_tree_american_put(100.0, 100.0, 0.0, 0.0, 0.2, 1.0, 2000) - eu).abs() < 5e-3);
    }

    #[test]
    fn point_seeds_differ() {
        assert_ne!(point_seed(1, &[0, 1]), point_seed(1, &[1, 0]));
        assert_ne!(point_seed(1, &[0]), point_seed(2, &[0]));
        assert_eq!(point_seed(5, &[3, 4]), point_seed(5, &[3, 4]));
    }
}
