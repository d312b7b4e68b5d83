//! Experiment execution across a worker pool and CSV/manifest output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{Axes, ScenarioMatrix};
use crate::engine::{run_experiment, ExperimentResult, ScenarioConfig};
use crate::error::{Error, Result};
use crate::network::Topology;

pub const TOOL_NAME: &str = "orgsync";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats `v` with 10 significant digits: fixed notation for moderate
/// magnitudes, scientific otherwise.
pub fn format_number(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".to_string() } else { v.to_string() };
    }
    let sci = format!("{v:.9e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..10).contains(&exp) {
        format!("{:.*}", (9 - exp).max(0) as usize, v)
    } else {
        sci
    }
}

/// Runs experiments on a dedicated thread pool.
pub struct Harness {
    pool: rayon::ThreadPool,
}

impl Harness {
    /// `workers = 0` uses every available core.
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::config("workers", e.to_string()))?;
        Ok(Harness { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs every scenario; a failing scenario does not stop the others.
    pub fn run(&self, scenarios: &[ScenarioConfig]) -> Vec<Result<ExperimentResult>> {
        self.pool
            .install(|| scenarios.iter().map(run_experiment).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub name: String,
    pub csv: String,
    pub config: ScenarioConfig,
    pub run_seeds: Vec<u64>,
    pub terminal_mean_performance: Option<f64>,
    pub terminal_mean_synchrony: Option<f64>,
    /// Coefficient of variation of final-period performance across runs.
    pub terminal_performance_cv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub name: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub matrix: ScenarioMatrix,
    pub workers: usize,
    pub wall_time_seconds: f64,
    pub scenarios: Vec<ScenarioRecord>,
    pub failures: Vec<Failure>,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes the per-period CSV of one experiment.
pub fn write_scenario_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::io(path, e);
    let csv_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["period", "mean_performance", "se_performance", "mean_synchrony", "se_synchrony"])
        .map_err(csv_err)?;
    for t in 0..result.periods() {
        w.write_record([
            (t + 1).to_string(),
            format_number(result.mean_performance[t]),
            format_number(result.se_performance[t]),
            format_number(result.mean_synchrony[t]),
            format_number(result.se_synchrony[t]),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

/// Writes one CSV per completed scenario plus `manifest.json` into `dir`.
/// Returns the paths written, manifest last.
pub fn emit_results(
    results: &[ExperimentResult],
    failures: &[Failure],
    matrix: &ScenarioMatrix,
    workers: usize,
    wall_time_seconds: f64,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut written = Vec::new();
    let mut records = Vec::new();
    for result in results {
        let name = result.config.name();
        let file = format!("{name}.csv");
        let path = dir.join(&file);
        write_scenario_csv(result, &path)?;
        written.push(path);
        records.push(ScenarioRecord {
            name,
            csv: file,
            config: result.config.clone(),
            run_seeds: result.run_seeds.clone(),
            terminal_mean_performance: result.mean_performance.last().copied(),
            terminal_mean_synchrony: result.mean_synchrony.last().copied(),
            terminal_performance_cv: result.terminal_performance_cv.is_finite().then_some(result.terminal_performance_cv),
        });
    }
    let manifest = Manifest {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        matrix: matrix.clone(),
        workers,
        wall_time_seconds,
        scenarios: records,
        failures: failures.to_vec(),
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

/// Outcome of running a whole matrix.
pub struct MatrixRun {
    pub results: Vec<ExperimentResult>,
    pub failures: Vec<Failure>,
    pub files: Vec<PathBuf>,
}

/// Expands `matrix`, optionally keeps only the scenario called `only`, runs
/// everything and writes the outputs to `dir`.
pub fn run_matrix(matrix: &ScenarioMatrix, harness: &Harness, only: Option<&str>, dir: &Path) -> Result<MatrixRun> {
    let mut scenarios = matrix.expand();
    if let Some(name) = only {
        scenarios.retain(|c| c.name() == name);
        if scenarios.is_empty() {
            return Err(Error::config("scenario", format!("no scenario named {name:?}")));
        }
    }
    let start = Instant::now();
    let outcomes = harness.run(&scenarios);
    let wall = start.elapsed().as_secs_f64();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (cfg, outcome) in scenarios.iter().zip(outcomes) {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => failures.push(Failure {
                name: cfg.name(),
                error: e.to_string(),
            }),
        }
    }
    let files = emit_results(&results, &failures, matrix, harness.workers(), wall, dir)?;
    Ok(MatrixRun {
        results,
        failures,
        files,
    })
}

/// A figure CSV: one mean series per topology for a fixed weight profile and
/// coupling regime.
struct Figure {
    file: &'static str,
    weights: [f64; 2],
    regime: [usize; 3],
    synchrony: bool,
}

const FIGURES: [Figure; 7] = [
    Figure {
        file: "fig4_synchrony_full_conformity.csv",
        weights: [0.0, 1.0],
        regime: [3, 0, 0],
        synchrony: true,
    },
    Figure {
        file: "fig5a_synchrony_moderate_internal.csv",
        weights: [0.5, 0.5],
        regime: [3, 0, 0],
        synchrony: true,
    },
    Figure {
        file: "fig5b_synchrony_moderate_external.csv",
        weights: [0.5, 0.5],
        regime: [2, 2, 2],
        synchrony: true,
    },
    Figure {
        file: "fig6a_performance_moderate_internal.csv",
        weights: [0.5, 0.5],
        regime: [3, 0, 0],
        synchrony: false,
    },
    Figure {
        file: "fig6b_performance_moderate_external.csv",
        weights: [0.5, 0.5],
        regime: [2, 2, 2],
        synchrony: false,
    },
    Figure {
        file: "baseline_synchrony_no_conformity_internal.csv",
        weights: [1.0, 0.0],
        regime: [3, 0, 0],
        synchrony: true,
    },
    Figure {
        file: "baseline_synchrony_no_conformity_external.csv",
        weights: [1.0, 0.0],
        regime: [2, 2, 2],
        synchrony: true,
    },
];

/// The matrix behind the published figures: all four topologies, both
/// coupling regimes and the three weight profiles, keeping the fixed
/// parameters, seed and first `rho` of `base`.
pub fn figure_matrix(base: &ScenarioMatrix) -> ScenarioMatrix {
    ScenarioMatrix {
        matrix: Axes {
            topologies: Topology::ALL.to_vec(),
            regimes: vec![[3, 0, 0], [2, 2, 2]],
            weights: vec![[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]],
            rhos: vec![base.matrix.rhos.first().copied().unwrap_or(0.9)],
        },
        ..base.clone()
    }
}

/// Runs [`figure_matrix`] and writes, besides the per-scenario outputs, one
/// CSV per figure with a `period` column and one column per topology.
pub fn reproduce_figures(base: &ScenarioMatrix, harness: &Harness, dir: &Path) -> Result<MatrixRun> {
    let matrix = figure_matrix(base);
    let mut run = run_matrix(&matrix, harness, None, dir)?;
    for fig in &FIGURES {
        let series: Vec<&ExperimentResult> = Topology::ALL
            .iter()
            .filter_map(|&topology| {
                run.results.iter().find(|r| {
                    let c = &r.config;
                    c.topology == topology
                        && [c.performance_weight, c.conformity_weight] == fig.weights
                        && [c.internal, c.external, c.coupled_agents] == fig.regime
                })
            })
            .collect();
        if series.len() != Topology::ALL.len() {
            // A scenario failed; it is already listed in the manifest.
            continue;
        }
        let path = dir.join(fig.file);
        let mut out = String::from("period");
        for t in Topology::ALL {
            out.push(',');
            out.push_str(t.name());
        }
        out.push('\n');
        for t in 0..matrix.fixed.periods as usize {
            out.push_str(&(t + 1).to_string());
            for r in &series {
                let v = if fig.synchrony { r.mean_synchrony[t] } else { r.mean_performance[t] };
                out.push(',');
                out.push_str(&format_number(v));
            }
            out.push('\n');
        }
        let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(&path, e))?;
        run.files.push(path);
    }
    Ok(run)
}
