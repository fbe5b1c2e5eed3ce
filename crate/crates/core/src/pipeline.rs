//! End-to-end surrogates: feature grids, grid pricers, training through
//! TT-cross, portfolio aggregation and error metrics.
//!
//! Cores are ordered feature-major with the most significant bit first, so
//! feature `f` with `n_f` bits occupies `n_f` consecutive binary cores.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cross::{init_index_sets, max_cross_evals, tt_cross_with_sets, BlackBoxPricer, CrossOptions, CrossReport, CrossVariant, IndexSets};
use crate::error::{Error, Result};
use crate::interp::{bracket, Bracket, InterpMode, Interpolator};
use crate::kernel::LatticeAxis;
use crate::market::{
    point_seed, price_american_arith_basket_put_lsmc, price_european_geo_basket_put, BasketModelParams,
    LsmcConfig, MarketPoint,
};
use crate::tt::{read_tt, write_tt, TensorTrain};

/// Bit layout recorded with every model.
pub const BIT_ORDER: &str = "feature-major, most significant bit first";

/// One grid feature: `2^bits` equally spaced values on `[min, max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub bits: usize,
}

impl FeatureSpec {
    /// Feature from a point count, which must be a power of two.
    pub fn with_points(name: &str, min: f64, max: f64, points: usize) -> Result<Self> {
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "feature '{name}': {points} points is not a power of two >= 2"
            )));
        }
        Ok(Self {
            name: name.to_string(),
            min,
            max,
            bits: points.trailing_zeros() as usize,
        })
    }

    pub fn points(&self) -> usize {
        1 << self.bits
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points() - 1) as f64
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.points() {
            self.max
        } else {
            self.min + self.spacing() * k as f64
        }
    }

    pub fn axis(&self) -> LatticeAxis {
        LatticeAxis {
            min: self.min,
            max: self.max,
            bits: self.bits,
        }
    }
}

/// Product lattice over named features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureGrid {
    pub features: Vec<FeatureSpec>,
}

impl FeatureGrid {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Dimension("grid needs at least one feature".into()));
        }
        for (i, f) in features.iter().enumerate() {
            if f.bits == 0 || f.bits > 40 {
                return Err(Error::Dimension(format!(
                    "feature '{}': {} bits is outside 1..=40",
                    f.name, f.bits
                )));
            }
            if !(f.min < f.max) || !f.min.is_finite() || !f.max.is_finite() {
                return Err(Error::Domain(format!(
                    "feature '{}': range [{}, {}] is empty",
                    f.name, f.min, f.max
                )));
            }
            if features[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::Dimension(format!("feature '{}' appears twice", f.name)));
            }
        }
        Ok(Self { features })
    }

    /// Basket grid in the order spots, strike, rate, maturity, with the
    /// usual ranges: spots $5-$150, strike $1-$200, rate 0.5%-8%,
    /// maturity one day to three years.
    pub fn basket(spot_points: &[usize], strike_points: usize, rate_points: usize, ttm_points: usize) -> Result<Self> {
        let mut features = Vec::new();
        for (i, &p) in spot_points.iter().enumerate() {
            features.push(FeatureSpec::with_points(&format!("spot{}", i + 1), 5.0, 150.0, p)?);
        }
        features.push(FeatureSpec::with_points("strike", 1.0, 200.0, strike_points)?);
        features.push(FeatureSpec::with_points("rate", 0.005, 0.08, rate_points)?);
        features.push(FeatureSpec::with_points("ttm", 1.0 / 365.0, 3.0, ttm_points)?);
        Self::new(features)
    }

    /// Five assets on 32 points, 64 strikes, 8 rates, 8 maturities:
    /// 37 binary cores, about 1.37e11 points.
    pub fn full_basket() -> Self {
        Self::basket(&[32; 5], 64, 8, 8).expect("valid fixed grid")
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn num_cores(&self) -> usize {
        self.features.iter().map(|f| f.bits).sum()
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![2; self.num_cores()]
    }

    pub fn total_points(&self) -> f64 {
        self.features.iter().map(|f| f.points() as f64).product()
    }

    pub fn axes(&self) -> Vec<LatticeAxis> {
        self.features.iter().map(FeatureSpec::axis).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    /// Per-feature lattice indices of a binary multi-index.
    pub fn decode(&self, idx: &[usize]) -> Result<Vec<usize>> {
        crate::tt::check_index(&self.shape(), idx)?;
        let mut out = Vec::with_capacity(self.features.len());
        let mut pos = 0;
        for f in &self.features {
            out.push(idx[pos..pos + f.bits].iter().fold(0usize, |acc, &b| 2 * acc + b));
            pos += f.bits;
        }
        Ok(out)
    }

    /// Binary multi-index of per-feature lattice indices.
    pub fn encode(&self, lattice: &[usize]) -> Result<Vec<usize>> {
        if lattice.len() != self.features.len() {
            return Err(Error::Dimension(format!(
                "{} lattice indices for {} features",
                lattice.len(),
                self.features.len()
            )));
        }
        let mut out = Vec::with_capacity(self.num_cores());
        for (f, &k) in self.features.iter().zip(lattice) {
            if k >= f.points() {
                return Err(Error::OutOfBounds {
                    index: lattice.to_vec(),
                    shape: self.features.iter().map(FeatureSpec::points).collect(),
                });
            }
            out.extend((0..f.bits).map(|p| (k >> (f.bits - 1 - p)) & 1));
        }
        Ok(out)
    }

    /// Feature values at a binary multi-index.
    pub fn point(&self, idx: &[usize]) -> Result<Vec<f64>> {
        Ok(self
            .decode(idx)?
            .iter()
            .zip(&self.features)
            .map(|(&k, f)| f.value(k))
            .collect())
    }

    /// Uniform sample from the continuous feature box.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.features.iter().map(|f| rng.random_range(f.min..=f.max)).collect()
    }
}

/// Lattice brackets of a point: per feature the lower index `k0` and the
/// offset towards `k0 + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridLocation {
    pub brackets: Vec<Bracket>,
}

impl GridLocation {
    /// Nearest lattice index per feature.
    pub fn nearest(&self) -> Vec<usize> {
        self.brackets
            .iter()
            .map(|b| b.k0 + usize::from(b.offset >= 0.5))
            .collect()
    }
}

/// Brackets of `x` on every feature of the grid.
pub fn grid_index_map(grid: &FeatureGrid, x: &[f64]) -> Result<GridLocation> {
    if x.len() != grid.num_features() {
        return Err(Error::Dimension(format!(
            "point has {} features, grid has {}",
            x.len(),
            grid.num_features()
        )));
    }
    let brackets = grid
        .features
        .iter()
        .zip(x)
        .map(|(f, &v)| {
            bracket(&f.axis(), v).map_err(|_| {
                Error::Domain(format!("feature '{}': {v} outside [{}, {}]", f.name, f.min, f.max))
            })
        })
        .collect::<Result<_>>()?;
    Ok(GridLocation { brackets })
}

/// What a grid pricer computes at each point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PricingTarget {
    /// Closed-form European put on the geometric basket average.
    EuropeanGeo { model: BasketModelParams },
    /// LSMC American put on the arithmetic basket average; each grid point
    /// uses its own seed derived from `lsmc.seed` and the index.
    AmericanArith { model: BasketModelParams, lsmc: LsmcConfig },
    /// `exp(w . x)`: separable, exactly rank 1 on any grid. For smoke tests.
    Exponential { weights: Vec<f64> },
}

impl PricingTarget {
    /// Price at a feature vector ordered spots, strike, rate, maturity.
    pub fn price(&self, x: &[f64], seed: u64) -> Result<f64> {
        if let Self::Exponential { weights } = self {
            if weights.len() != x.len() {
                return Err(Error::Dimension(format!("{} weights for {} features", weights.len(), x.len())));
            }
            return Ok(weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>().exp());
        }
        let n = x.len().checked_sub(3).filter(|&n| n >= 1).ok_or_else(|| {
            Error::Dimension(format!("basket point needs at least 4 features, got {}", x.len()))
        })?;
        let p = MarketPoint {
            spots: x[..n].to_vec(),
            strike: x[n],
            rate: x[n + 1],
            ttm: x[n + 2],
        };
        match self {
            Self::EuropeanGeo { model } => price_european_geo_basket_put(&p, model),
            Self::AmericanArith { model, lsmc } => {
                let cfg = LsmcConfig { seed, ..lsmc.clone() };
                Ok(price_american_arith_basket_put_lsmc(&p, model, &cfg)?.price)
            }
            Self::Exponential { .. } => unreachable!("handled above"),
        }
    }

    fn base_seed(&self) -> u64 {
        match self {
            Self::AmericanArith { lsmc, .. } => lsmc.seed,
            _ => 0,
        }
    }

    /// Whether repeated calls with different seeds give different prices.
    pub fn is_stochastic(&self) -> bool {
        matches!(self, Self::AmericanArith { .. })
    }

    /// Number of grid features the target expects.
    pub fn num_features(&self) -> usize {
        match self {
            Self::EuropeanGeo { model } | Self::AmericanArith { model, .. } => model.num_assets() + 3,
            Self::Exponential { weights } => weights.len(),
        }
    }
}

/// A pricing target sampled on the lattice of a grid.
pub struct GridPricer {
    grid: FeatureGrid,
    target: PricingTarget,
    shape: Vec<usize>,
    count: AtomicU64,
    nanos: AtomicU64,
}

impl GridPricer {
    pub fn new(grid: FeatureGrid, target: PricingTarget) -> Result<Self> {
        if grid.num_features() != target.num_features() {
            return Err(Error::Incompatible(format!(
                "grid has {} features, the pricing target needs {}",
                grid.num_features(),
                target.num_features()
            )));
        }
        let shape = grid.shape();
        Ok(Self {
            grid,
            target,
            shape,
            count: AtomicU64::new(0),
            nanos: AtomicU64::new(0),
        })
    }

    pub fn grid(&self) -> &FeatureGrid {
        &self.grid
    }

    pub fn target(&self) -> &PricingTarget {
        &self.target
    }

    /// Price at a grid multi-index, with that index's seed.
    pub fn price_index(&self, idx: &[usize]) -> Result<f64> {
        let x = self.grid.point(idx)?;
        self.target.price(&x, point_seed(self.target.base_seed(), idx))
    }
}

impl BlackBoxPricer for GridPricer {
    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn eval_batch(&self, batch: &[Vec<usize>]) -> Result<Vec<f64>> {
        let start = Instant::now();
        let values: Vec<Result<f64>> = batch.par_iter().map(|idx| self.price_index(idx)).collect();
        self.nanos.fetch_add(start.elapsed().as_nanos() as u64, Ordering::Relaxed);
        self.count.fetch_add(batch.len() as u64, Ordering::Relaxed);
        values
            .into_iter()
            .zip(batch)
            .map(|(v, idx)| match v {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(v) => Err(Error::Pricer {
                    index: idx.clone(),
                    message: format!("non-finite price {v}"),
                }),
                Err(e) => Err(Error::Pricer {
                    index: idx.clone(),
                    message: e.to_string(),
                }),
            })
            .collect()
    }

    fn eval_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    fn eval_nanos(&self) -> u64 {
        self.nanos.load(Ordering::Relaxed)
    }
}

/// Training settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub rank: usize,
    pub sweeps: usize,
    pub seed: u64,
    #[serde(default)]
    pub tol: f64,
    #[serde(default = "default_validation")]
    pub validation_samples: usize,
    #[serde(default = "default_mode")]
    pub mode: InterpMode,
    #[serde(default = "default_variant")]
    pub variant: CrossVariant,
    #[serde(default = "default_keep_best")]
    pub keep_best: bool,
}

fn default_variant() -> CrossVariant {
    CrossVariant::TwoSite
}

fn default_keep_best() -> bool {
    true
}

fn default_validation() -> usize {
    256
}

fn default_mode() -> InterpMode {
    InterpMode::Linear
}

impl TrainOptions {
    pub fn new(rank: usize, sweeps: usize, seed: u64) -> Self {
        Self {
            rank,
            sweeps,
            seed,
            tol: 0.0,
            validation_samples: default_validation(),
            mode: default_mode(),
            variant: default_variant(),
            keep_best: default_keep_best(),
        }
    }
}

/// Provenance stored next to a trained model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub bit_order: String,
    #[serde(default)]
    pub config_hash: Option<String>,
    #[serde(default)]
    pub train: Option<TrainOptions>,
    #[serde(default)]
    pub cross: Option<CrossReport>,
    /// Pricer calls used to build the model; the effective training set.
    pub evals_used: u64,
    pub train_seconds: f64,
    /// Wall time spent inside pricer batches.
    pub data_gen_seconds: f64,
    #[serde(default)]
    pub model_params: serde_json::Value,
    #[serde(default)]
    pub portfolio: Vec<f64>,
}

impl Default for Manifest {
    fn default() -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            bit_order: BIT_ORDER.to_string(),
            config_hash: None,
            train: None,
            cross: None,
            evals_used: 0,
            train_seconds: 0.0,
            data_gen_seconds: 0.0,
            model_params: serde_json::Value::Null,
            portfolio: Vec::new(),
        }
    }
}

/// Sidecar JSON: everything but the cores.
#[derive(Serialize, Deserialize)]
struct Sidecar {
    grid: FeatureGrid,
    mode: InterpMode,
    manifest: Manifest,
}

/// A trained price surface on a grid.
#[derive(Clone, Debug)]
pub struct SurrogateModel {
    grid: FeatureGrid,
    interp: Interpolator,
    pub manifest: Manifest,
}

impl SurrogateModel {
    pub fn new(grid: FeatureGrid, tt: TensorTrain, mode: InterpMode, manifest: Manifest) -> Result<Self> {
        if tt.dims() != grid.shape() {
            return Err(Error::Incompatible(format!(
                "train has {} cores of dims {:?}, grid needs {} binary cores",
                tt.num_cores(),
                tt.dims(),
                grid.num_cores()
            )));
        }
        let interp = Interpolator::new(tt, grid.axes(), mode)?;
        Ok(Self { grid, interp, manifest })
    }

    pub fn grid(&self) -> &FeatureGrid {
        &self.grid
    }

    pub fn train(&self) -> &TensorTrain {
        self.interp.train()
    }

    pub fn mode(&self) -> InterpMode {
        self.interp.mode()
    }

    pub fn with_mode(&self, mode: InterpMode) -> Result<Self> {
        Self::new(self.grid.clone(), self.train().clone(), mode, self.manifest.clone())
    }

    /// Price at an arbitrary point inside the grid box.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.grid.num_features() {
            return Err(Error::Dimension(format!(
                "point has {} features, model has {}",
                x.len(),
                self.grid.num_features()
            )));
        }
        self.interp.eval(x)
    }

    pub fn eval_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.interp.eval_batch(xs)
    }

    pub fn par_eval_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.interp.par_eval_batch(xs)
    }

    /// Writes the cores (binary) and a JSON sidecar.
    pub fn save(&self, tt_path: &Path, json_path: &Path) -> Result<()> {
        write_tt(self.train(), BufWriter::new(File::create(tt_path)?))?;
        let side = Sidecar {
            grid: self.grid.clone(),
            mode: self.mode(),
            manifest: self.manifest.clone(),
        };
        serde_json::to_writer_pretty(BufWriter::new(File::create(json_path)?), &side)?;
        Ok(())
    }

    pub fn load(tt_path: &Path, json_path: &Path) -> Result<Self> {
        let tt = read_tt(BufReader::new(File::open(tt_path)?))?;
        let side: Sidecar = serde_json::from_reader(BufReader::new(File::open(json_path)?))?;
        Self::new(side.grid, tt, side.mode, side.manifest)
    }

    /// `dir/model.tt` and `dir/model.json`.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.save(&dir.join("model.tt"), &dir.join("model.json"))
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        Self::load(&dir.join("model.tt"), &dir.join("model.json"))
    }
}

/// Runs TT-cross on `pricer` over `grid` from random initial index sets.
pub fn train_surrogate<P: BlackBoxPricer + ?Sized>(
    pricer: &P,
    grid: &FeatureGrid,
    opts: &TrainOptions,
) -> Result<SurrogateModel> {
    let init = init_index_sets(&grid.shape(), opts.rank, opts.seed)?;
    train_surrogate_from(pricer, grid, opts, init).map(|(m, _)| m)
}

/// [`train_surrogate`] from caller-supplied index sets; also returns the
/// final sets.
pub fn train_surrogate_from<P: BlackBoxPricer + ?Sized>(
    pricer: &P,
    grid: &FeatureGrid,
    opts: &TrainOptions,
    init: IndexSets,
) -> Result<(SurrogateModel, IndexSets)> {
    if pricer.shape() != grid.shape().as_slice() {
        return Err(Error::Incompatible(format!(
            "pricer shape {:?} does not match a grid of {} binary cores",
            pricer.shape(),
            grid.num_cores()
        )));
    }
    let cross_opts = cross_options(grid, opts);
    let nanos0 = pricer.eval_nanos();
    let start = Instant::now();
    let (tt, report, sets) = tt_cross_with_sets(pricer, init, &cross_opts)?;
    let train_seconds = start.elapsed().as_secs_f64();
    let manifest = Manifest {
        train: Some(opts.clone()),
        evals_used: report.evals_used,
        cross: Some(report),
        train_seconds,
        data_gen_seconds: (pricer.eval_nanos() - nanos0) as f64 * 1e-9,
        ..Manifest::default()
    };
    Ok((SurrogateModel::new(grid.clone(), tt, opts.mode, manifest)?, sets))
}

/// Cross settings used for `opts` on `grid`.
pub fn cross_options(grid: &FeatureGrid, opts: &TrainOptions) -> CrossOptions {
    CrossOptions {
        tol: opts.tol,
        validation_samples: opts.validation_samples,
        seed: opts.seed,
        variant: opts.variant,
        keep_best: opts.keep_best && opts.validation_samples > 0,
        ..CrossOptions::uniform(grid.num_cores(), opts.rank, opts.sweeps)
    }
}

/// Largest rank up to `max_rank` whose worst-case call count with the
/// other settings of `opts` fits in `budget`.
pub fn rank_for_budget(grid: &FeatureGrid, opts: &TrainOptions, budget: u64, max_rank: usize) -> Option<usize> {
    (1..=max_rank)
        .take_while(|&r| {
            let o = TrainOptions { rank: r, ..opts.clone() };
            max_cross_evals(&grid.shape(), &cross_options(grid, &o)) <= budget
        })
        .last()
}

/// Weighted positions in surrogates that share one grid.
#[derive(Clone, Debug, Default)]
pub struct Portfolio<'a> {
    pub positions: Vec<(&'a SurrogateModel, f64)>,
}

impl<'a> Portfolio<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(mut self, model: &'a SurrogateModel, weight: f64) -> Self {
        self.positions.push((model, weight));
        self
    }
}

/// One surrogate for `Σ w_i P_i`: weighted sum of the trains, rounded to
/// relative accuracy `eps`.
pub fn portfolio_tt(p: &Portfolio<'_>, eps: f64) -> Result<SurrogateModel> {
    let (first, _) = p
        .positions
        .first()
        .ok_or_else(|| Error::Incompatible("portfolio has no positions".into()))?;
    let grid = first.grid();
    let mode = first.mode();
    let mut acc: Option<TensorTrain> = None;
    for (m, w) in &p.positions {
        if m.grid() != grid {
            return Err(Error::Incompatible("portfolio positions use different grids".into()));
        }
        if m.mode() != mode {
            return Err(Error::Incompatible("portfolio positions use different inference modes".into()));
        }
        let t = m.train().scale(*w);
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t)?,
        });
    }
    let tt = acc.expect("nonempty").round(eps);
    let manifest = Manifest {
        evals_used: p.positions.iter().map(|(m, _)| m.manifest.evals_used).sum(),
        portfolio: p.positions.iter().map(|(_, w)| *w).collect(),
        ..Manifest::default()
    };
    SurrogateModel::new(grid.clone(), tt, mode, manifest)
}

/// A test point and its reference price.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestPoint {
    pub x: Vec<f64>,
    pub price: f64,
}

/// `n` points drawn uniformly from the grid's feature box.
pub fn uniform_points(grid: &FeatureGrid, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| grid.sample_uniform(&mut rng)).collect()
}

/// Uniform test set priced by `target`. Stochastic targets use seeds
/// derived from `seed` and the sample number, independent of any grid
/// seeds.
pub fn make_test_set(grid: &FeatureGrid, target: &PricingTarget, n: usize, seed: u64) -> Result<Vec<TestPoint>> {
    let xs = uniform_points(grid, n, seed);
    xs.into_par_iter()
        .enumerate()
        .map(|(i, x)| {
            let price = target.price(&x, point_seed(seed ^ 0x07e5_75e7, &[i]))?;
            Ok(TestPoint { x, price })
        })
        .collect()
}

pub fn mean_absolute_error(pred: &[f64], reference: &[f64]) -> Result<f64> {
    if pred.is_empty() || pred.len() != reference.len() {
        return Err(Error::Dimension(format!(
            "{} predictions for {} references",
            pred.len(),
            reference.len()
        )));
    }
    Ok(pred.iter().zip(reference).map(|(a, b)| (a - b).abs()).sum::<f64>() / pred.len() as f64)
}

/// MAE of the surrogate against reference prices.
pub fn evaluate_mae(model: &SurrogateModel, test: &[TestPoint]) -> Result<f64> {
    let xs: Vec<Vec<f64>> = test.iter().map(|t| t.x.clone()).collect();
    let pred = model.par_eval_batch(&xs)?;
    let reference: Vec<f64> = test.iter().map(|t| t.price).collect();
    mean_absolute_error(&pred, &reference)
}
