use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use orgsync_core::output::TOOL_VERSION;
use orgsync_core::{reproduce_figures, run_matrix, Error, Harness, ScenarioMatrix};

/// Runs organizational synchrony experiments and writes CSV results plus a
/// manifest.
#[derive(Debug, Parser)]
#[command(name = "orgsync", version = TOOL_VERSION)]
struct Args {
    /// TOML scenario matrix; omitted values take the benchmark defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides `output` in the config).
    #[arg(long, value_name = "DIR")]
    output: Option<PathBuf>,

    /// Master seed (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    workers: usize,

    /// Run only the scenario with this name, e.g. `ring_kcs222_w0.5-0.5_rho0.9`.
    #[arg(long, value_name = "NAME", conflicts_with = "reproduce_figures")]
    scenario: Option<String>,

    /// Run every topology, regime and weight profile behind the published
    /// figures and write one CSV per figure.
    #[arg(long)]
    reproduce_figures: bool,

    /// Print the expanded scenario names and exit.
    #[arg(long)]
    list: bool,
}

fn load(args: &Args) -> Result<ScenarioMatrix, Error> {
    let mut matrix = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            ScenarioMatrix::parse(&text)?
        }
        None => ScenarioMatrix::default(),
    };
    if let Some(seed) = args.seed {
        matrix.seed = seed;
    }
    if let Some(dir) = &args.output {
        matrix.output = dir.to_string_lossy().into_owned();
    }
    Ok(matrix)
}

fn run(args: &Args) -> Result<usize, Error> {
    let matrix = load(args)?;
    if args.list {
        for cfg in matrix.expand() {
            println!("{}", cfg.name());
        }
        return Ok(0);
    }
    let harness = Harness::new(args.workers)?;
    let dir = PathBuf::from(&matrix.output);
    eprintln!("orgsync {TOOL_VERSION}: {} worker(s), writing to {}", harness.workers(), dir.display());
    let start = Instant::now();
    let outcome = if args.reproduce_figures {
        reproduce_figures(&matrix, &harness, &dir)?
    } else {
        run_matrix(&matrix, &harness, args.scenario.as_deref(), &dir)?
    };
    for r in &outcome.results {
        eprintln!(
            "  {}: terminal performance {:.4}, synchrony {:.4}",
            r.config.name(),
            r.mean_performance.last().copied().unwrap_or(f64::NAN),
            r.mean_synchrony.last().copied().unwrap_or(f64::NAN)
        );
    }
    for f in &outcome.failures {
        eprintln!("  {} failed: {}", f.name, f.error);
    }
    eprintln!(
        "{} scenario(s) completed, {} failed in {:.1}s",
        outcome.results.len(),
        outcome.failures.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(outcome.failures.len())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
