//! Library side of the `ttsurrogate` binary: config parsing, the four verbs
//! and the benchmark harness.

pub mod bench;
pub mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use tensor_surrogate::pipeline::{train_surrogate, GridPricer, SurrogateModel};

use crate::config::{Resolved, RunConfig};

/// Failure of a verb, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad config, bad input file or unwritable output: exit code 2.
    #[error("{0}")]
    Config(String),
    /// The numerics failed on valid input: exit code 3.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl From<tensor_surrogate::Error> for CliError {
    fn from(e: tensor_surrogate::Error) -> Self {
        use tensor_surrogate::Error as E;
        match e {
            E::SingularPivot { .. }
            | E::SingularKernel(_)
            | E::Pricer { .. }
            | E::BudgetExhausted { .. }
            | E::CrossAborted { .. }
            | E::Numerical(_) => Self::Numerical(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Config(e.to_string())
    }
}

/// Loads and validates a config, applying a seed override.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<Resolved, CliError> {
    let mut cfg = RunConfig::from_path(path)?;
    if let Some(s) = seed {
        cfg.train.seed = s;
    }
    cfg.resolve()
}

/// Output directory: the flag, then the config, then `default`.
pub fn out_dir(flag: Option<PathBuf>, cfg: &RunConfig, default: &str) -> PathBuf {
    flag.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from(default))
}

/// `train`: one cross run with the config's train settings, saved to
/// `out/model.tt` and `out/model.json`.
pub fn cmd_train(run: &Resolved, out: &Path) -> Result<SurrogateModel, CliError> {
    let pricer = GridPricer::new(run.grid.clone(), run.target.clone())?;
    let mut model = train_surrogate(&pricer, &run.grid, &run.config.train)?;
    model.manifest.config_hash = Some(run.hash.clone());
    model.manifest.model_params = serde_json::to_value(&run.target).expect("target serializes");
    model.save_dir(out)?;
    let m = &model.manifest;
    let report = m.cross.as_ref().expect("trained model has a report");
    println!(
        "trained {} cores: ranks {:?}, {} pricer calls ({:.3e} of the grid), {} passes (kept pass {})",
        run.grid.num_cores(),
        report.ranks,
        m.evals_used,
        m.evals_used as f64 / run.grid.total_points(),
        report.sweeps_run,
        report.selected_pass,
    );
    if let Some(err) = report.validation_error {
        println!("validation relative error {err:.3e}");
    }
    println!(
        "train {:.3} s, of which pricing {:.3} s; saved to {}",
        m.train_seconds,
        m.data_gen_seconds,
        out.display()
    );
    Ok(model)
}

/// `eval`: prices every row of a query CSV whose header lists the model's
/// feature names. Returns the prices.
pub fn cmd_eval(model_dir: &Path, queries: &Path, out: Option<&Path>) -> Result<Vec<f64>, CliError> {
    let model = SurrogateModel::load_dir(model_dir)?;
    let names = model.grid().names();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(File::open(queries)?));
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let empty_file = header.len() == 1 && header[0].is_empty() || header.is_empty();
    let mut xs = Vec::new();
    if !empty_file {
        if header != names {
            return Err(CliError::Config(format!(
                "query columns {header:?} do not match model features {names:?}"
            )));
        }
        for (line, rec) in reader.records().enumerate() {
            let rec = rec?;
            let x = rec
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Config(format!("query row {}: {e}", line + 1)))?;
            xs.push(x);
        }
    }

    let start = Instant::now();
    let prices = model.eval_batch(&xs)?;
    let elapsed = start.elapsed().as_secs_f64();
    if !xs.is_empty() {
        eprintln!(
            "evaluated {} queries in {elapsed:.4} s ({:.1} us per query)",
            xs.len(),
            1e6 * elapsed / xs.len() as f64
        );
    }

    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(names.iter().map(String::as_str).chain(["price"]))?;
    for (x, p) in xs.iter().zip(&prices) {
        w.write_record(x.iter().chain([p]).map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(prices)
}

/// `inspect`: grid, ranks, storage and manifest of a saved model.
pub fn cmd_inspect(model_dir: &Path) -> Result<String, CliError> {
    let model = SurrogateModel::load_dir(model_dir)?;
    let tt = model.train();
    let mut s = String::new();
    s += &format!("features: {}\n", model.grid().names().join(", "));
    s += &format!(
        "cores: {} ({:.4e} grid points)\n",
        tt.num_cores(),
        model.grid().total_points()
    );
    s += &format!("ranks: {:?} (max {})\n", tt.bond_ranks(), tt.max_rank());
    s += &format!("storage: {} floats\n", tt.storage());
    s += &format!("mode: {}\n", serde_json::to_string(&model.mode()).expect("mode serializes"));
    s += "manifest:\n";
    s += &serde_json::to_string_pretty(&model.manifest).expect("manifest serializes");
    s.push('\n');
    Ok(s)
}
