//! Simulation runs and Monte Carlo experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{AgentState, Preferences};
use crate::bits::{BitString, DecisionVector};
use crate::error::{Error, Result};
use crate::landscape::{LandscapeSet, NkcsParams, DEFAULT_ENUMERATION_BITS};
use crate::metrics::synchrony;
use crate::network::{Network, Topology};
use crate::seed::{derive_seed, rng_from, run_seed, stream};
use crate::stats::mean_and_se;
use rand::Rng;

/// Every parameter of one scenario. Defaults reproduce the benchmark setting:
/// 5 agents with 4 tasks each, `rho = 0.9`, memory of 50 periods, 500 periods
/// and 1000 repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub agents: usize,
    pub tasks_per_agent: usize,
    pub internal: usize,
    pub external: usize,
    pub coupled_agents: usize,
    pub rho: f64,
    pub memory_span: u64,
    pub periods: u64,
    pub repetitions: usize,
    pub performance_weight: f64,
    pub conformity_weight: f64,
    pub topology: Topology,
    pub seed: u64,
    pub homologous_patterns: bool,
    pub warmup_conformity: bool,
    pub enumeration_bits: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            agents: 5,
            tasks_per_agent: 4,
            internal: 3,
            external: 0,
            coupled_agents: 0,
            rho: 0.9,
            memory_span: 50,
            periods: 500,
            repetitions: 1000,
            performance_weight: 0.5,
            conformity_weight: 0.5,
            topology: Topology::Star,
            seed: 42,
            homologous_patterns: true,
            warmup_conformity: true,
            enumeration_bits: DEFAULT_ENUMERATION_BITS,
        }
    }
}

impl ScenarioConfig {
    pub fn nkcs(&self) -> NkcsParams {
        NkcsParams::new(
            self.agents,
            self.tasks_per_agent,
            self.internal,
            self.external,
            self.coupled_agents,
        )
    }

    pub fn preferences(&self) -> Result<Preferences> {
        Preferences::new(self.performance_weight, self.conformity_weight)
    }

    pub fn tasks(&self) -> usize {
        self.agents * self.tasks_per_agent
    }

    pub fn validate(&self) -> Result<()> {
        self.nkcs().validate()?;
        self.preferences()?;
        if self.agents < 3 {
            return Err(Error::config("agents", "networks need at least 3 agents"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::config("rho", format!("{} is outside [0, 1]", self.rho)));
        }
        if self.memory_span == 0 {
            return Err(Error::config("memory_span", "must be positive"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions", "must be positive"));
        }
        if self.tasks() > self.enumeration_bits {
            return Err(Error::config(
                "enumeration_bits",
                format!("2^{} states exceed the enumeration budget of 2^{}", self.tasks(), self.enumeration_bits),
            ));
        }
        Ok(())
    }

    /// Short identifier such as `ring_kcs222_w0.5-0.5_rho0.9`.
    pub fn name(&self) -> String {
        format!(
            "{}_kcs{}{}{}_w{}-{}_rho{}",
            self.topology,
            self.internal,
            self.external,
            self.coupled_agents,
            self.performance_weight,
            self.conformity_weight,
            self.rho
        )
    }
}

/// Time series of one run, indexed by period `1..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub performance: Vec<f64>,
    pub synchrony: Vec<f64>,
    pub final_state: DecisionVector,
    pub global_max: f64,
}

/// State of a run in progress. Each period every agent proposes a flip and
/// decides against the decisions of period `t - 1`; all decisions are then
/// committed together and shared along the network.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: ScenarioConfig,
    seed: u64,
    landscape: LandscapeSet,
    network: Network,
    agents: Vec<AgentState>,
    state: DecisionVector,
    period: u64,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let landscape = LandscapeSet::from_seed(
            cfg.nkcs(),
            cfg.homologous_patterns,
            cfg.rho,
            derive_seed(seed, &[stream::LANDSCAPE]),
            cfg.enumeration_bits,
        )?;
        if landscape.global_max() <= 0.0 {
            return Err(Error::DegenerateLandscape(landscape.global_max()));
        }
        let network = Network::build(cfg.topology, cfg.agents)?;
        let initial: u64 = rng_from(seed, &[stream::INITIAL_STATE]).random();
        let state = BitString::from_word(initial, cfg.tasks());
        let prefs = cfg.preferences()?;
        let agents = (0..cfg.agents)
            .map(|p| {
                AgentState::new(
                    p,
                    state.block(p, cfg.tasks_per_agent),
                    prefs,
                    cfg.memory_span,
                    cfg.warmup_conformity,
                )
            })
            .collect();
        Ok(Simulation {
            cfg: cfg.clone(),
            seed,
            landscape,
            network,
            agents,
            state,
            period: 0,
        })
    }

    pub fn landscape(&self) -> &LandscapeSet {
        &self.landscape
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn state(&self) -> DecisionVector {
        self.state
    }

    /// Last completed period (0 before the first step).
    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn normalized_performance(&self) -> f64 {
        self.landscape.org_performance(&self.state) / self.landscape.global_max()
    }

    pub fn synchrony(&self) -> f64 {
        synchrony(&self.state, self.cfg.agents, self.cfg.tasks_per_agent)
    }

    pub fn step(&mut self) -> Result<()> {
        let order: Vec<usize> = (0..self.agents.len()).collect();
        self.step_in_order(&order)
    }

    /// Advances one period, evaluating agents in `order`. The outcome does not
    /// depend on the order; it exists so that this can be checked.
    pub fn step_in_order(&mut self, order: &[usize]) -> Result<()> {
        let t = self.period + 1;
        let context = self.state;
        let mut decisions = vec![None; self.agents.len()];
        for &p in order {
            let agent = &self.agents[p];
            let mut rng = rng_from(self.seed, &[stream::SEARCH, p as u64, t]);
            let proposal = agent.propose(&mut rng);
            decisions[p] = Some(agent.decide(&self.landscape, &proposal, &context, t));
        }
        for (p, decision) in decisions.into_iter().enumerate() {
            let bits = decision.expect("evaluation order must cover every agent");
            self.agents[p].set_own_bits(bits);
            self.state.set_block(p, &bits);
        }
        let n = self.cfg.tasks_per_agent;
        for q in 0..self.agents.len() {
            let shared: Vec<(usize, BitString)> = self
                .network
                .in_neighbors(q)
                .iter()
                .map(|&p| (p, self.state.block(p, n)))
                .collect();
            self.agents[q].observe(&shared, t)?;
        }
        self.period = t;
        Ok(())
    }
}

/// Runs one repetition of `cfg` from `seed`.
pub fn run_once(cfg: &ScenarioConfig, seed: u64) -> Result<RunResult> {
    let mut sim = Simulation::new(cfg, seed)?;
    let periods = cfg.periods as usize;
    let mut performance = Vec::with_capacity(periods);
    let mut sync = Vec::with_capacity(periods);
    for _ in 0..periods {
        sim.step()?;
        performance.push(sim.normalized_performance());
        sync.push(sim.synchrony());
    }
    Ok(RunResult {
        seed,
        performance,
        synchrony: sync,
        final_state: sim.state(),
        global_max: sim.landscape().global_max(),
    })
}

/// Per-period means and standard errors over all repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ScenarioConfig,
    pub runs: usize,
    pub run_seeds: Vec<u64>,
    pub mean_performance: Vec<f64>,
    pub se_performance: Vec<f64>,
    pub mean_synchrony: Vec<f64>,
    pub se_synchrony: Vec<f64>,
    /// Coefficient of variation of the final-period performance across runs.
    pub terminal_performance_cv: f64,
}

impl ExperimentResult {
    /// Aggregates runs in the order given.
    pub fn aggregate(config: &ScenarioConfig, runs: &[RunResult]) -> Self {
        let periods = config.periods as usize;
        let mut out = ExperimentResult {
            config: config.clone(),
            runs: runs.len(),
            run_seeds: runs.iter().map(|r| r.seed).collect(),
            mean_performance: Vec::with_capacity(periods),
            se_performance: Vec::with_capacity(periods),
            mean_synchrony: Vec::with_capacity(periods),
            se_synchrony: Vec::with_capacity(periods),
            terminal_performance_cv: f64::NAN,
        };
        let mut column = Vec::with_capacity(runs.len());
        for t in 0..periods {
            column.clear();
            column.extend(runs.iter().map(|r| r.performance[t]));
            let (m, se) = mean_and_se(&column);
            out.mean_performance.push(m);
            out.se_performance.push(se);
            column.clear();
            column.extend(runs.iter().map(|r| r.synchrony[t]));
            let (m, se) = mean_and_se(&column);
            out.mean_synchrony.push(m);
            out.se_synchrony.push(se);
        }
        if periods > 0 {
            let (m, se) = (out.mean_performance[periods - 1], out.se_performance[periods - 1]);
            out.terminal_performance_cv = se * (runs.len() as f64).sqrt() / m;
        }
        out
    }

    pub fn periods(&self) -> usize {
        self.mean_performance.len()
    }
}

/// Runs `cfg.repetitions` independent repetitions on the current rayon pool.
/// Repetition `r` uses a seed split from `cfg.seed`, and aggregation follows
/// repetition order, so results do not depend on the number of threads.
pub fn run_experiment(cfg: &ScenarioConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let runs = (0..cfg.repetitions as u64)
        .into_par_iter()
        .map(|r| run_once(cfg, run_seed(cfg.seed, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult::aggregate(cfg, &runs))
}
