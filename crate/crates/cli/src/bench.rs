//! Benchmark harness: a ladder of surrogate budgets, optional dense GPR
//! rows and direct-pricing rows, all scored on one shared test set.
//!
//! Budgets run one after another so their timings do not overlap; pricing
//! inside a budget uses the rayon pool. Inference is timed single-threaded.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tensor_surrogate::gpr::{gpr_fit_standardized, gpr_predict, select_length_scale_with};
use tensor_surrogate::market::point_seed;
use tensor_surrogate::pipeline::{
    make_test_set, mean_absolute_error, rank_for_budget, train_surrogate, uniform_points, GridPricer,
    TestPoint, TrainOptions,
};

use crate::config::{Budget, GprBaseline, Resolved};
use crate::CliError;

pub const CSV_HEADER: &str = "method,train_set_size,train_seconds,data_gen_seconds,infer_seconds_per_query,mae";

/// Largest rank a call budget may resolve to.
pub const MAX_BUDGET_RANK: usize = 64;

/// One CSV line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub train_set_size: u64,
    pub train_seconds: f64,
    pub data_gen_seconds: f64,
    pub infer_seconds_per_query: f64,
    pub mae: f64,
}

/// A row plus what produced it; failed entries have no row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Entry {
    pub label: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<ResultRow>,
    #[serde(default)]
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchSummary {
    pub config_hash: String,
    pub grid_points: f64,
    pub test_size: usize,
    pub mean_test_price: f64,
    pub entries: Vec<Entry>,
    /// Ladder steps where the surrogate MAE went up.
    pub stn_mae_inversions: usize,
}

impl BenchSummary {
    pub fn rows(&self) -> Vec<&ResultRow> {
        self.entries.iter().filter_map(|e| e.row.as_ref()).collect()
    }
}

fn failed(label: String, e: impl std::fmt::Display) -> Entry {
    log::warn!("{label} failed: {e}");
    Entry {
        label,
        ok: false,
        error: Some(e.to_string()),
        row: None,
        detail: serde_json::Value::Null,
    }
}

fn direct_entry(run: &Resolved, test: &[TestPoint]) -> Entry {
    let seed = run.config.test_seed ^ 0xd1ec7;
    let start = Instant::now();
    let prices: Result<Vec<f64>, _> = test
        .iter()
        .enumerate()
        .map(|(i, t)| run.target.price(&t.x, point_seed(seed, &[i])))
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    let label = "direct".to_string();
    let prices = match prices {
        Ok(p) => p,
        Err(e) => return failed(label, e),
    };
    let refs: Vec<f64> = test.iter().map(|t| t.price).collect();
    let mae = mean_absolute_error(&prices, &refs).unwrap_or(f64::NAN);
    Entry {
        label,
        ok: true,
        error: None,
        row: Some(ResultRow {
            method: "direct".into(),
            train_set_size: 0,
            train_seconds: 0.0,
            data_gen_seconds: 0.0,
            infer_seconds_per_query: elapsed / test.len() as f64,
            mae,
        }),
        detail: serde_json::json!({ "stochastic": run.target.is_stochastic() }),
    }
}

fn stn_entry(run: &Resolved, budget: &Budget, test: &[TestPoint]) -> Entry {
    let base = &run.config.train;
    let (label, opts) = match budget {
        Budget::Evals { evals } => {
            let label = format!("stn evals<={evals}");
            match rank_for_budget(&run.grid, base, *evals, MAX_BUDGET_RANK) {
                Some(rank) => (label, TrainOptions { rank, ..base.clone() }),
                None => return failed(label, format!("no rank fits in {evals} pricer calls")),
            }
        }
        Budget::Rank { rank, sweeps } => (
            format!("stn rank {rank}"),
            TrainOptions {
                rank: *rank,
                sweeps: sweeps.unwrap_or(base.sweeps),
                ..base.clone()
            },
        ),
    };
    let pricer = match GridPricer::new(run.grid.clone(), run.target.clone()) {
        Ok(p) => p,
        Err(e) => return failed(label, e),
    };
    let model = match train_surrogate(&pricer, &run.grid, &opts) {
        Ok(m) => m,
        Err(e) => return failed(label, e),
    };
    let xs: Vec<Vec<f64>> = test.iter().map(|t| t.x.clone()).collect();
    let start = Instant::now();
    let pred = match model.eval_batch(&xs) {
        Ok(p) => p,
        Err(e) => return failed(label, e),
    };
    let infer = start.elapsed().as_secs_f64() / xs.len() as f64;
    let refs: Vec<f64> = test.iter().map(|t| t.price).collect();
    let mae = mean_absolute_error(&pred, &refs).unwrap_or(f64::NAN);
    let m = &model.manifest;
    let report = m.cross.as_ref().expect("trained model has a report");
    Entry {
        label,
        ok: true,
        error: None,
        row: Some(ResultRow {
            method: "stn".into(),
            train_set_size: m.evals_used,
            train_seconds: m.train_seconds,
            data_gen_seconds: m.data_gen_seconds,
            infer_seconds_per_query: infer,
            mae,
        }),
        detail: serde_json::json!({
            "rank": opts.rank,
            "sweeps": opts.sweeps,
            "ranks": report.ranks,
            "selected_pass": report.selected_pass,
            "validation_error": report.validation_error,
            "validation_history": report.validation_history,
        }),
    }
}

fn gpr_entry(run: &Resolved, g: &GprBaseline, n: usize, test: &[TestPoint]) -> Entry {
    let label = format!("gpr n={n}");
    let axes = run.grid.axes();
    let normalize = |x: &[f64]| -> Vec<f64> { axes.iter().zip(x).map(|(a, v)| a.normalize(*v)).collect() };

    let xs = uniform_points(&run.grid, n, g.seed ^ (n as u64).rotate_left(32));
    let start = Instant::now();
    let ys: Result<Vec<f64>, _> = xs
        .par_iter()
        .enumerate()
        .map(|(i, x)| run.target.price(x, point_seed(g.seed, &[n, i])))
        .collect();
    let data_gen = start.elapsed().as_secs_f64();
    let ys = match ys {
        Ok(y) => y,
        Err(e) => return failed(label, e),
    };

    let start = Instant::now();
    let xn: Vec<Vec<f64>> = xs.iter().map(|x| normalize(x)).collect();
    let fitted = select_length_scale_with(&xn, &ys, &g.length_scales, g.noise, g.amplitude)
        .and_then(|s| gpr_fit_standardized(&xn, &ys, s.best, g.noise).map(|m| (s, m)));
    let fit_seconds = start.elapsed().as_secs_f64();
    let (search, model) = match fitted {
        Ok(v) => v,
        Err(e) => return failed(label, e),
    };

    let queries: Vec<Vec<f64>> = test.iter().map(|t| normalize(&t.x)).collect();
    let start = Instant::now();
    let pred: Vec<f64> = queries.iter().map(|q| gpr_predict(&model, q)).collect();
    let infer = start.elapsed().as_secs_f64() / queries.len() as f64;
    let refs: Vec<f64> = test.iter().map(|t| t.price).collect();
    let mae = mean_absolute_error(&pred, &refs).unwrap_or(f64::NAN);
    Entry {
        label,
        ok: true,
        error: None,
        row: Some(ResultRow {
            method: "gpr".into(),
            train_set_size: n as u64,
            train_seconds: data_gen + fit_seconds,
            data_gen_seconds: data_gen,
            infer_seconds_per_query: infer,
            mae,
        }),
        detail: serde_json::json!({
            "length_scale": search.best,
            "hit_upper_edge": search.hit_upper_edge,
            "fit_seconds": fit_seconds,
        }),
    }
}

/// Runs the whole protocol and writes `results.csv` and `summary.json`
/// into `out`.
pub fn run_bench(run: &Resolved, out: &Path) -> Result<BenchSummary, CliError> {
    let cfg = &run.config;
    if cfg.test_size == 0 {
        return Err(CliError::Config("bench needs test_size >= 1".into()));
    }
    std::fs::create_dir_all(out)?;
    let test = make_test_set(&run.grid, &run.target, cfg.test_size, cfg.test_seed)?;
    let mean_test_price = test.iter().map(|t| t.price).sum::<f64>() / test.len() as f64;

    let mut entries = Vec::new();
    if cfg.direct {
        entries.push(direct_entry(run, &test));
    }
    let default_ladder = [Budget::Rank {
        rank: cfg.train.rank,
        sweeps: None,
    }];
    let ladder = if cfg.ladder.is_empty() { &default_ladder[..] } else { &cfg.ladder[..] };
    for b in ladder {
        let e = stn_entry(run, b, &test);
        log::info!("{}: {:?}", e.label, e.row);
        entries.push(e);
    }
    if let Some(g) = &cfg.gpr {
        for &n in &g.samples {
            entries.push(gpr_entry(run, g, n, &test));
        }
    }

    let stn: Vec<f64> = entries
        .iter()
        .filter_map(|e| e.row.as_ref())
        .filter(|r| r.method == "stn")
        .map(|r| r.mae)
        .collect();
    let stn_mae_inversions = stn.windows(2).filter(|w| w[1] > w[0]).count();

    let mut w = csv::Writer::from_path(out.join("results.csv"))?;
    for e in &entries {
        if let Some(r) = &e.row {
            w.serialize(r)?;
        }
    }
    if entries.iter().all(|e| e.row.is_none()) {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;

    let summary = BenchSummary {
        config_hash: run.hash.clone(),
        grid_points: run.grid.total_points(),
        test_size: test.len(),
        mean_test_price,
        entries,
        stn_mae_inversions,
    };
    std::fs::write(
        out.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    if summary.entries.iter().all(|e| !e.ok) {
        return Err(CliError::Numerical("every benchmark entry failed".into()));
    }
    Ok(summary)
}

/// Fixed-width table of a summary, for the terminal.
pub fn render(summary: &BenchSummary) -> String {
    let mut s = format!(
        "config {}  test points {}  mean price {:.4}\n",
        &summary.config_hash[..12],
        summary.test_size,
        summary.mean_test_price
    );
    s += &format!(
        "{:<20} {:>10} {:>10} {:>10} {:>12} {:>12}\n",
        "entry", "train_n", "train_s", "datagen_s", "infer_s/q", "mae"
    );
    for e in &summary.entries {
        match &e.row {
            Some(r) => {
                s += &format!(
                    "{:<20} {:>10} {:>10.3} {:>10.3} {:>12.3e} {:>12.5}\n",
                    e.label, r.train_set_size, r.train_seconds, r.data_gen_seconds, r.infer_seconds_per_query, r.mae
                )
            }
            None => s += &format!("{:<20} FAILED: {}\n", e.label, e.error.as_deref().unwrap_or("")),
        }
    }
    if summary.stn_mae_inversions > 0 {
        s += &format!("note: surrogate MAE rose at {} ladder step(s)\n", summary.stn_mae_inversions);
    }
    s
}
