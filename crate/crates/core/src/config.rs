//! Scenario matrices: parameter grids read from TOML documents.
//!
//! ```toml
//! seed = 42
//! output = "results"
//!
//! [fixed]
//! periods = 500
//! repetitions = 1000
//!
//! [matrix]
//! topologies = ["star", "cycle"]
//! regimes = [[3, 0, 0], [2, 2, 2]]
//! weights = [[0.5, 0.5]]
//! rhos = [0.9]
//! ```
//!
//! Every omitted value takes its benchmark default.

use serde::{Deserialize, Serialize};

use crate::engine::ScenarioConfig;
use crate::error::{Error, Result};
use crate::network::Topology;

/// Parameters shared by every scenario of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedParams {
    pub agents: usize,
    pub tasks_per_agent: usize,
    pub memory_span: u64,
    pub periods: u64,
    pub repetitions: usize,
    pub homologous_patterns: bool,
    pub warmup_conformity: bool,
    pub enumeration_bits: usize,
}

impl Default for FixedParams {
    fn default() -> Self {
        let d = ScenarioConfig::default();
        FixedParams {
            agents: d.agents,
            tasks_per_agent: d.tasks_per_agent,
            memory_span: d.memory_span,
            periods: d.periods,
            repetitions: d.repetitions,
            homologous_patterns: d.homologous_patterns,
            warmup_conformity: d.warmup_conformity,
            enumeration_bits: d.enumeration_bits,
        }
    }
}

/// Lists of values whose cross product defines the scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Axes {
    pub topologies: Vec<Topology>,
    /// `[K, C, S]` coupling regimes.
    pub regimes: Vec<[usize; 3]>,
    /// `[performance, conformity]` weight profiles.
    pub weights: Vec<[f64; 2]>,
    pub rhos: Vec<f64>,
}

impl Default for Axes {
    fn default() -> Self {
        let d = ScenarioConfig::default();
        Axes {
            topologies: Topology::ALL.to_vec(),
            regimes: vec![[d.internal, d.external, d.coupled_agents]],
            weights: vec![[d.performance_weight, d.conformity_weight]],
            rhos: vec![d.rho],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioMatrix {
    /// Master seed shared by all scenarios.
    pub seed: u64,
    pub output: String,
    pub fixed: FixedParams,
    pub matrix: Axes,
}

impl Default for ScenarioMatrix {
    fn default() -> Self {
        ScenarioMatrix {
            seed: ScenarioConfig::default().seed,
            output: "results".to_string(),
            fixed: FixedParams::default(),
            matrix: Axes::default(),
        }
    }
}

impl ScenarioMatrix {
    /// Parses and validates a TOML document.
    pub fn parse(text: &str) -> Result<Self> {
        let matrix: ScenarioMatrix = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        matrix.validate()?;
        Ok(matrix)
    }

    /// Recovers the matrix recorded in a results manifest.
    pub fn from_manifest(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Partial {
            matrix: ScenarioMatrix,
        }
        let partial: Partial = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        partial.matrix.validate()?;
        Ok(partial.matrix)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario matrix serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let axes = &self.matrix;
        for (name, len) in [
            ("matrix.topologies", axes.topologies.len()),
            ("matrix.regimes", axes.regimes.len()),
            ("matrix.weights", axes.weights.len()),
            ("matrix.rhos", axes.rhos.len()),
        ] {
            if len == 0 {
                return Err(Error::config(name, "must list at least one value"));
            }
        }
        for (i, [a, b]) in axes.weights.iter().enumerate() {
            if !(*a >= 0.0 && *b >= 0.0) {
                return Err(Error::config(format!("matrix.weights[{i}]"), "weights must be non-negative"));
            }
            if (a + b - 1.0).abs() > 1e-9 {
                return Err(Error::config(format!("matrix.weights[{i}]"), "weights must sum to 1"));
            }
        }
        for (i, rho) in axes.rhos.iter().enumerate() {
            if !(0.0..=1.0).contains(rho) {
                return Err(Error::config(format!("matrix.rhos[{i}]"), format!("{rho} is outside [0, 1]")));
            }
        }
        let n = self.fixed.tasks_per_agent;
        for (i, &[k, c, s]) in axes.regimes.iter().enumerate() {
            let field = format!("matrix.regimes[{i}]");
            if n > 0 && k > n - 1 {
                return Err(Error::config(field, format!("K = {k} exceeds N - 1 = {}", n - 1)));
            }
            if c > n {
                return Err(Error::config(field, format!("C = {c} exceeds N = {n}")));
            }
            if self.fixed.agents > 0 && s > self.fixed.agents - 1 {
                return Err(Error::config(field, format!("S = {s} exceeds P - 1 = {}", self.fixed.agents - 1)));
            }
        }
        for cfg in self.expand() {
            cfg.validate().map_err(|e| match e {
                Error::Config { field, message } => Error::config(format!("fixed.{field}"), message),
                other => other,
            })?;
        }
        Ok(())
    }

    /// One config per combination, ordered by regime, weights, rho, then
    /// topology.
    pub fn expand(&self) -> Vec<ScenarioConfig> {
        let f = &self.fixed;
        let mut out = Vec::new();
        for &[internal, external, coupled_agents] in &self.matrix.regimes {
            for &[performance_weight, conformity_weight] in &self.matrix.weights {
                for &rho in &self.matrix.rhos {
                    for &topology in &self.matrix.topologies {
                        out.push(ScenarioConfig {
                            agents: f.agents,
                            tasks_per_agent: f.tasks_per_agent,
                            internal,
                            external,
                            coupled_agents,
                            rho,
                            memory_span: f.memory_span,
                            periods: f.periods,
                            repetitions: f.repetitions,
                            performance_weight,
                            conformity_weight,
                            topology,
                            seed: self.seed,
                            homologous_patterns: f.homologous_patterns,
                            warmup_conformity: f.warmup_conformity,
                            enumeration_bits: f.enumeration_bits,
                        });
                    }
                }
            }
        }
        out
    }
}
