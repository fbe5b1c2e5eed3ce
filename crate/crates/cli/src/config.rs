//! Run configuration: a JSON document with a `schema_version` field.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "experiment": "european-geo",
//!   "grid": [
//!     { "name": "spot1", "min": 5, "max": 150, "points": 16 },
//!     { "name": "spot2", "min": 5, "max": 150, "points": 16 },
//!     { "name": "strike", "min": 1, "max": 200, "points": 32 },
//!     { "name": "rate", "min": 0.005, "max": 0.08, "points": 8 },
//!     { "name": "ttm", "min": 0.00274, "max": 3, "points": 8 }
//!   ],
//!   "train": { "rank": 4, "sweeps": 6, "seed": 1 },
//!   "ladder": [ { "evals": 1000 }, { "rank": 6 } ],
//!   "gpr": { "samples": [500, 1000] },
//!   "direct": true,
//!   "test_size": 1000
//! }
//! ```
//!
//! Basket experiments read features as spots, strike, rate, maturity.
//! `model` defaults to 20% vols, 0.5 correlation and no dividends;
//! `american-arith` takes `lsmc` (default 2,000 paths x 30 steps).
//! `custom` needs an explicit `target`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tensor_surrogate::gpr::{log_spaced, Amplitude};
use tensor_surrogate::market::{BasketModelParams, LsmcConfig};
use tensor_surrogate::pipeline::{FeatureGrid, FeatureSpec, GridPricer, PricingTarget, TrainOptions};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    EuropeanGeo,
    AmericanArith,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// One step of a bench ladder: a call budget (largest rank that fits) or
/// an explicit rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Budget {
    Evals { evals: u64 },
    Rank {
        rank: usize,
        #[serde(default)]
        sweeps: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GprBaseline {
    /// Training-set sizes, one row each.
    pub samples: Vec<usize>,
    /// Length-scale candidates in normalized units (feature range = 1).
    #[serde(default = "default_length_scales")]
    pub length_scales: Vec<f64>,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub amplitude: Amplitude,
    #[serde(default)]
    pub seed: u64,
}

fn default_length_scales() -> Vec<f64> {
    log_spaced(0.01, 10.0, 7)
}

fn default_test_size() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub grid: Vec<FeatureConfig>,
    #[serde(default)]
    pub model: Option<BasketModelParams>,
    #[serde(default)]
    pub lsmc: Option<LsmcConfig>,
    #[serde(default)]
    pub target: Option<PricingTarget>,
    pub train: TrainOptions,
    #[serde(default)]
    pub ladder: Vec<Budget>,
    #[serde(default)]
    pub gpr: Option<GprBaseline>,
    #[serde(default)]
    pub direct: bool,
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    #[serde(default)]
    pub test_seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

/// A checked config with its grid and pricing target resolved.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub grid: FeatureGrid,
    pub target: PricingTarget,
    pub hash: String,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn grid(&self) -> Result<FeatureGrid, CliError> {
        let features = self
            .grid
            .iter()
            .map(|f| FeatureSpec::with_points(&f.name, f.min, f.max, f.points))
            .collect::<Result<Vec<_>, _>>()
            .map_err(config_err)?;
        FeatureGrid::new(features).map_err(config_err)
    }

    pub fn target(&self) -> Result<PricingTarget, CliError> {
        let n = self.grid.len();
        let model = || -> Result<BasketModelParams, CliError> {
            if n < 4 {
                return Err(CliError::Config(format!(
                    "basket experiments need spots, strike, rate and ttm features; got {n} features"
                )));
            }
            let m = self.model.clone().unwrap_or_else(|| BasketModelParams::default_for(n - 3));
            m.validate(n - 3).map_err(config_err)?;
            Ok(m)
        };
        let target = match self.experiment {
            Experiment::EuropeanGeo => PricingTarget::EuropeanGeo { model: model()? },
            Experiment::AmericanArith => {
                let lsmc = self.lsmc.clone().unwrap_or_else(|| LsmcConfig::new(2000, 30, 0));
                lsmc.validate().map_err(config_err)?;
                PricingTarget::AmericanArith { model: model()?, lsmc }
            }
            Experiment::Custom => self
                .target
                .clone()
                .ok_or_else(|| CliError::Config("custom experiments need a `target`".into()))?,
        };
        if self.experiment != Experiment::Custom && self.target.is_some() {
            return Err(CliError::Config("`target` is only read by custom experiments".into()));
        }
        Ok(target)
    }

    /// Validates everything before any pricing happens.
    pub fn resolve(self) -> Result<Resolved, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let grid = self.grid()?;
        let target = self.target()?;
        GridPricer::new(grid.clone(), target.clone()).map_err(config_err)?;
        let t = &self.train;
        if t.rank == 0 || t.sweeps == 0 {
            return Err(CliError::Config("train.rank and train.sweeps must be positive".into()));
        }
        for b in &self.ladder {
            if matches!(b, Budget::Rank { rank: 0, .. } | Budget::Rank { sweeps: Some(0), .. } | Budget::Evals { evals: 0 }) {
                return Err(CliError::Config(format!("ladder entry {b:?} is empty")));
            }
        }
        if let Some(g) = &self.gpr {
            if g.samples.contains(&0) || g.length_scales.is_empty() || g.length_scales.iter().any(|l| !(*l > 0.0)) {
                return Err(CliError::Config("gpr needs positive sample counts and length scales".into()));
            }
            if g.noise < 0.0 {
                return Err(CliError::Config("gpr.noise must be nonnegative".into()));
            }
        }
        let hash = self.hash();
        Ok(Resolved {
            config: self,
            grid,
            target,
            hash,
        })
    }
}

fn config_err(e: tensor_surrogate::Error) -> CliError {
    CliError::Config(e.to_string())
}
