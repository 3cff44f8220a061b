//! `boxde`: experiment driver and log analysis for the boxde library.
//!
//! `boxde run --config spec.json` expands a grid spec into runs, executes
//! them on a bounded worker pool, and writes one log bundle per run plus a
//! `manifest.json` binding every bundle to the spec (by content and by
//! SHA-256). The analysis subcommands read bundles back and emit CSV
//! summaries on stdout or into a file.
//!
//! Exit codes: 0 on full success, 2 on partial failure or any error.
//! Reruns with the same spec are byte-identical regardless of `--workers`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::{env, fs};

use clap::{Args, Parser, Subcommand};

use boxde::{Error, Result};

mod analyze;
mod config;
mod driver;

use config::ExperimentSpec;

/// Consulted for the output directory when neither `--out` nor the spec's
/// `out_dir` is given.
const OUT_DIR_ENV: &str = "BOXDE_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "boxde",
    version,
    about = "Run box-constrained DE experiments and analyse their logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a JSON spec into runs, execute them, write bundles + manifest.
    Run(RunArgs),
    /// ECDF of correction cosine similarities pooled over bundles.
    EcdfCs(BundleArgs),
    /// Fixed-target ECDF (51 log-spaced targets, 1e-8..1e2) over bundles.
    EcdfTarget(BundleArgs),
    /// Expected running time to a fitness target over bundles.
    Ert(ErtArgs),
    /// Final POIS per bundle, or a windowed series with --window.
    Pois(PoisArgs),
    /// Per-generation population diversity per bundle.
    Diversity(BundleArgs),
    /// Closed-form oracles and randomized proposition suites.
    TheoryCheck(TheoryArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides the spec's out_dir and $BOXDE_OUT_DIR.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long, value_name = "K")]
    workers: Option<usize>,
    /// Master seed; overrides the spec's master_seed.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Args)]
struct BundleArgs {
    /// Run bundle directories, or experiment directories holding a
    /// manifest.json (expanded to their successful runs).
    #[arg(required = true, value_name = "DIR")]
    runs: Vec<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ErtArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    /// Fitness target.
    #[arg(long)]
    target: f64,
    /// Per-run evaluation budget cap.
    #[arg(long)]
    budget: u64,
}

#[derive(Args)]
struct PoisArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    /// Emit a sliding-window series (window in generations) instead of
    /// final values.
    #[arg(long, value_name = "W")]
    window: Option<usize>,
}

#[derive(Args)]
struct TheoryArgs {
    /// Randomized instances per proposition suite.
    #[arg(long, default_value_t = 100_000)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.config)?;
    let mut spec: ExperimentSpec = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        spec.master_seed = seed;
    }
    let out = args
        .out
        .or_else(|| spec.out_dir.clone())
        .or_else(|| env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .ok_or_else(|| {
            Error::Config(format!(
                "no output directory: pass --out, set out_dir in the spec, or set {OUT_DIR_ENV}"
            ))
        })?;
    spec.validate()?;
    println!(
        "configs: {}, runs: {}, output: {}",
        spec.config_count(),
        spec.run_count(),
        out.display()
    );
    let outcome = driver::run_experiment(&spec, &out, args.workers)?;
    if outcome.failed > 0 {
        eprintln!(
            "{} of {} runs failed; see {}",
            outcome.failed,
            outcome.total,
            outcome.manifest_path.display()
        );
        Ok(ExitCode::from(2))
    } else {
        println!(
            "{} runs complete; manifest at {}",
            outcome.total,
            outcome.manifest_path.display()
        );
        Ok(ExitCode::SUCCESS)
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::EcdfCs(a) => {
            analyze::ecdf_cs(&a.runs, a.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::EcdfTarget(a) => {
            analyze::ecdf_target(&a.runs, a.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Ert(a) => {
            analyze::ert_summary(&a.bundle.runs, a.target, a.budget, a.bundle.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pois(a) => {
            analyze::pois(&a.bundle.runs, a.window, a.bundle.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Diversity(a) => {
            analyze::diversity(&a.runs, a.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TheoryCheck(a) => {
            let clean = analyze::theory_check(a.instances, a.seed, a.out.as_deref())?;
            if clean {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("theory-check: propositions 3/5 reported violations");
                Ok(ExitCode::from(2))
            }
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
