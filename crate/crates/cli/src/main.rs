use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tensor_surrogate_cli::{bench, cmd_eval, cmd_inspect, cmd_train, load_config, out_dir, CliError};

/// Tensor-train price surrogates: train, evaluate, benchmark, inspect.
#[derive(Parser)]
#[command(name = "ttsurrogate", version)]
struct Cli {
    /// Worker threads for pricing (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a surrogate and save it as model.tt + model.json.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Price the points of a query CSV with a saved surrogate.
    Eval {
        /// Directory holding model.tt and model.json.
        #[arg(long)]
        model: PathBuf,
        /// CSV with one column per feature, named as in the model.
        #[arg(long)]
        queries: PathBuf,
        /// Output CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the benchmark ladder; writes results.csv and summary.json.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print ranks and manifest of a saved surrogate.
    Inspect {
        #[arg(long)]
        model: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot set up {n} threads: {e}")))?;
    }
    match cli.command {
        Command::Train { config, out, seed } => {
            let run = load_config(&config, seed)?;
            let out = out_dir(out, &run.config, "ttsurrogate-model");
            cmd_train(&run, &out)?;
        }
        Command::Eval { model, queries, out } => {
            cmd_eval(&model, &queries, out.as_deref())?;
        }
        Command::Bench { config, out, seed } => {
            let run = load_config(&config, seed)?;
            let out = out_dir(out, &run.config, "ttsurrogate-bench");
            let summary = bench::run_bench(&run, &out)?;
            print!("{}", bench::render(&summary));
            println!("wrote {}", out.join("results.csv").display());
        }
        Command::Inspect { model } => print!("{}", cmd_inspect(&model)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
