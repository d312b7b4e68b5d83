//! Agent-based simulation of multi-unit organizations whose units search
//! correlated NKCS landscapes while trading off their own performance against
//! conformity with the decisions they observe from peers.

pub mod agent;
pub mod bits;
pub mod config;
pub mod engine;
pub mod error;
pub mod landscape;
pub mod metrics;
pub mod network;
pub mod output;
pub mod seed;
pub mod stats;

pub use agent::{AgentState, MemoryEntry, Preferences};
pub use bits::{BitString, DecisionVector};
pub use config::ScenarioMatrix;
pub use engine::{run_experiment, run_once, ExperimentResult, RunResult, ScenarioConfig, Simulation};
pub use error::{Error, Result};
pub use landscape::{InteractionMatrix, LandscapeSet, NkcsParams};
pub use network::{Network, Topology};
pub use output::{emit_results, reproduce_figures, run_matrix, Harness};
