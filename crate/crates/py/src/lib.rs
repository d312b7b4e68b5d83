//! Python bindings. Decision vectors cross the boundary as lists of 0/1
//! integers, position 0 first.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use orgsync_core::landscape::DEFAULT_ENUMERATION_BITS;
use orgsync_core::{metrics, seed, BitString, Error};
use orgsync_core::{InteractionMatrix as CoreMatrix, LandscapeSet as CoreLandscape, NkcsParams};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn bits(values: &[u8]) -> PyResult<BitString> {
    BitString::from_bits(values).map_err(to_py)
}

fn list(b: &BitString) -> Vec<u8> {
    b.iter().map(u8::from).collect()
}

fn check_len(b: &BitString, expected: usize) -> PyResult<()> {
    if b.len() == expected {
        Ok(())
    } else {
        Err(to_py(Error::Length { expected, found: b.len() }))
    }
}

/// Task interaction matrix of an NKCS landscape.
#[pyclass(module = "orgsync", frozen, skip_from_py_object)]
#[derive(Clone)]
struct InteractionMatrix {
    inner: CoreMatrix,
}

#[pymethods]
impl InteractionMatrix {
    #[new]
    #[pyo3(signature = (agents=5, tasks_per_agent=4, internal=3, external=0, coupled_agents=0, seed=0, homologous=true))]
    fn new(
        agents: usize,
        tasks_per_agent: usize,
        internal: usize,
        external: usize,
        coupled_agents: usize,
        seed: u64,
        homologous: bool,
    ) -> PyResult<Self> {
        let params = NkcsParams::new(agents, tasks_per_agent, internal, external, coupled_agents);
        let inner = CoreMatrix::from_seed(params, homologous, seed).map_err(to_py)?;
        Ok(InteractionMatrix { inner })
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn to_list(&self) -> Vec<Vec<u8>> {
        let m = self.inner.size();
        (0..m).map(|i| (0..m).map(|j| u8::from(self.inner.get(i, j))).collect()).collect()
    }

    /// Tasks coupled to `task` in row-index order, excluding `task` itself.
    fn dependencies(&self, task: usize) -> PyResult<Vec<usize>> {
        self.check_task(task)?;
        Ok(self.inner.dependencies(task).to_vec())
    }

    /// Agents coupled to `agent`, in slot order.
    fn partners(&self, agent: usize) -> PyResult<Vec<usize>> {
        if agent >= self.inner.params().agents {
            return Err(PyValueError::new_err(format!("agent {agent} out of range")));
        }
        Ok(self.inner.partners(agent).to_vec())
    }

    fn row_sums(&self) -> Vec<usize> {
        (0..self.inner.size()).map(|i| self.inner.row_sum(i)).collect()
    }

    fn column_sums(&self) -> Vec<usize> {
        (0..self.inner.size()).map(|j| self.inner.column_sum(j)).collect()
    }

    fn __repr__(&self) -> String {
        let p = self.inner.params();
        format!(
            "InteractionMatrix(P={}, N={}, K={}, C={}, S={})",
            p.agents, p.tasks_per_agent, p.internal, p.external, p.coupled_agents
        )
    }
}

impl InteractionMatrix {
    fn check_task(&self, task: usize) -> PyResult<()> {
        if task < self.inner.size() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("task {task} out of range")))
        }
    }
}

/// One correlated contribution table per agent, with the enumerated global
/// maximum of the organizational performance.
#[pyclass(module = "orgsync", frozen, skip_from_py_object)]
struct LandscapeSet {
    inner: CoreLandscape,
}

#[pymethods]
impl LandscapeSet {
    #[new]
    #[pyo3(signature = (agents=5, tasks_per_agent=4, internal=3, external=0, coupled_agents=0, rho=0.9, seed=0, homologous=true))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        py: Python<'_>,
        agents: usize,
        tasks_per_agent: usize,
        internal: usize,
        external: usize,
        coupled_agents: usize,
        rho: f64,
        seed: u64,
        homologous: bool,
    ) -> PyResult<Self> {
        let params = NkcsParams::new(agents, tasks_per_agent, internal, external, coupled_agents);
        let inner = py
            .detach(|| CoreLandscape::from_seed(params, homologous, rho, seed, DEFAULT_ENUMERATION_BITS))
            .map_err(to_py)?;
        Ok(LandscapeSet { inner })
    }

    /// Loads a binary dump written by `save`.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let file = File::open(&path).map_err(|e| to_py(Error::io(&path, e)))?;
        let inner = CoreLandscape::read_dump(BufReader::new(file), DEFAULT_ENUMERATION_BITS).map_err(to_py)?;
        Ok(LandscapeSet { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        let file = File::create(&path).map_err(|e| to_py(Error::io(&path, e)))?;
        self.inner.write_dump(BufWriter::new(file)).map_err(to_py)
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho()
    }

    #[getter]
    fn interactions(&self) -> InteractionMatrix {
        InteractionMatrix {
            inner: self.inner.interactions().clone(),
        }
    }

    #[getter]
    fn global_max(&self) -> f64 {
        self.inner.global_max()
    }

    #[getter]
    fn global_argmax(&self) -> Vec<u8> {
        list(&self.inner.global_argmax())
    }

    /// Contribution table of `task`, indexed by row index.
    fn table(&self, task: usize) -> PyResult<Vec<f64>> {
        if task >= self.inner.params().tasks() {
            return Err(PyValueError::new_err(format!("task {task} out of range")));
        }
        Ok(self.inner.table(task).to_vec())
    }

    fn contribution(&self, x: Vec<u8>, task: usize) -> PyResult<f64> {
        let x = self.vector(&x)?;
        if task >= self.inner.params().tasks() {
            return Err(PyValueError::new_err(format!("task {task} out of range")));
        }
        Ok(self.inner.contribution(&x, task))
    }

    fn agent_performance(&self, x: Vec<u8>, agent: usize) -> PyResult<f64> {
        let x = self.vector(&x)?;
        if agent >= self.inner.params().agents {
            return Err(PyValueError::new_err(format!("agent {agent} out of range")));
        }
        Ok(self.inner.agent_performance(&x, agent))
    }

    fn org_performance(&self, x: Vec<u8>) -> PyResult<f64> {
        Ok(self.inner.org_performance(&self.vector(&x)?))
    }

    fn normalized_performance(&self, x: Vec<u8>) -> PyResult<f64> {
        self.inner.normalized_performance(&self.vector(&x)?).map_err(to_py)
    }
}

impl LandscapeSet {
    fn vector(&self, x: &[u8]) -> PyResult<BitString> {
        let b = bits(x)?;
        check_len(&b, self.inner.params().tasks())?;
        Ok(b)
    }
}

/// Directed communication network between agents.
#[pyclass(module = "orgsync", frozen, skip_from_py_object)]
struct Network {
    inner: orgsync_core::Network,
}

#[pymethods]
impl Network {
    #[new]
    #[pyo3(signature = (topology, agents=5))]
    fn new(topology: &str, agents: usize) -> PyResult<Self> {
        let kind = topology.parse().map_err(to_py)?;
        let inner = orgsync_core::Network::build(kind, agents).map_err(to_py)?;
        Ok(Network { inner })
    }

    #[getter]
    fn topology(&self) -> &'static str {
        self.inner.kind().name()
    }

    #[getter]
    fn agents(&self) -> usize {
        self.inner.agents()
    }

    /// Sorted `(sender, receiver)` pairs.
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn in_neighbors(&self, agent: usize) -> PyResult<Vec<usize>> {
        self.check(agent)?;
        Ok(self.inner.in_neighbors(agent).to_vec())
    }

    fn out_neighbors(&self, agent: usize) -> PyResult<Vec<usize>> {
        self.check(agent)?;
        Ok(self.inner.out_neighbors(agent).to_vec())
    }

    /// `r[i][j]` is true when information from `i` eventually reaches `j`.
    fn reachability(&self) -> Vec<Vec<bool>> {
        self.inner.reachability()
    }

    fn __repr__(&self) -> String {
        format!("Network({:?}, agents={})", self.inner.kind().name(), self.inner.agents())
    }
}

impl Network {
    fn check(&self, agent: usize) -> PyResult<()> {
        if agent < self.inner.agents() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("agent {agent} out of range")))
        }
    }
}

/// Parameters of one experiment. Every argument defaults to the benchmark
/// setting.
#[pyclass(module = "orgsync", from_py_object)]
#[derive(Clone)]
struct ScenarioConfig {
    inner: orgsync_core::ScenarioConfig,
}

#[pymethods]
impl ScenarioConfig {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, pyo3::types::PyDict>>) -> PyResult<Self> {
        let mut cfg = ScenarioConfig {
            inner: orgsync_core::ScenarioConfig::default(),
        };
        if let Some(kwargs) = kwargs {
            for (key, value) in kwargs.iter() {
                cfg.__setattr__(&key.extract::<String>()?, &value)?;
            }
        }
        cfg.inner.validate().map_err(to_py)?;
        Ok(cfg)
    }

    fn __setattr__(&mut self, name: &str, value: &Bound<'_, PyAny>) -> PyResult<()> {
        let c = &mut self.inner;
        match name {
            "agents" => c.agents = value.extract()?,
            "tasks_per_agent" => c.tasks_per_agent = value.extract()?,
            "internal" => c.internal = value.extract()?,
            "external" => c.external = value.extract()?,
            "coupled_agents" => c.coupled_agents = value.extract()?,
            "rho" => c.rho = value.extract()?,
            "memory_span" => c.memory_span = value.extract()?,
            "periods" => c.periods = value.extract()?,
            "repetitions" => c.repetitions = value.extract()?,
            "performance_weight" => c.performance_weight = value.extract()?,
            "conformity_weight" => c.conformity_weight = value.extract()?,
            "topology" => c.topology = value.extract::<String>()?.parse().map_err(to_py)?,
            "seed" => c.seed = value.extract()?,
            "homologous_patterns" => c.homologous_patterns = value.extract()?,
            "warmup_conformity" => c.warmup_conformity = value.extract()?,
            "enumeration_bits" => c.enumeration_bits = value.extract()?,
            _ => return Err(PyValueError::new_err(format!("unknown parameter {name:?}"))),
        }
        Ok(())
    }

    fn __getattr__(&self, py: Python<'_>, name: &str) -> PyResult<Py<PyAny>> {
        let c = &self.inner;
        let value = match name {
            "agents" => c.agents.into_pyobject(py)?.into_any(),
            "tasks_per_agent" => c.tasks_per_agent.into_pyobject(py)?.into_any(),
            "internal" => c.internal.into_pyobject(py)?.into_any(),
            "external" => c.external.into_pyobject(py)?.into_any(),
            "coupled_agents" => c.coupled_agents.into_pyobject(py)?.into_any(),
            "rho" => c.rho.into_pyobject(py)?.into_any(),
            "memory_span" => c.memory_span.into_pyobject(py)?.into_any(),
            "periods" => c.periods.into_pyobject(py)?.into_any(),
            "repetitions" => c.repetitions.into_pyobject(py)?.into_any(),
            "performance_weight" => c.performance_weight.into_pyobject(py)?.into_any(),
            "conformity_weight" => c.conformity_weight.into_pyobject(py)?.into_any(),
            "topology" => c.topology.name().into_pyobject(py)?.into_any(),
            "seed" => c.seed.into_pyobject(py)?.into_any(),
            "homologous_patterns" => c.homologous_patterns.into_pyobject(py)?.to_owned().into_any(),
            "warmup_conformity" => c.warmup_conformity.into_pyobject(py)?.to_owned().into_any(),
            "enumeration_bits" => c.enumeration_bits.into_pyobject(py)?.into_any(),
            _ => return Err(pyo3::exceptions::PyAttributeError::new_err(name.to_string())),
        };
        Ok(value.unbind())
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("ScenarioConfig({})", self.inner.name())
    }
}

/// Per-period trajectory of a single run.
#[pyclass(module = "orgsync", frozen, get_all, skip_from_py_object)]
struct RunResult {
    seed: u64,
    performance: Vec<f64>,
    synchrony: Vec<f64>,
    final_state: Vec<u8>,
    global_max: f64,
}

/// Cross-run means and standard errors per period.
#[pyclass(module = "orgsync", frozen, get_all, skip_from_py_object)]
struct ExperimentResult {
    config: ScenarioConfig,
    runs: usize,
    run_seeds: Vec<u64>,
    mean_performance: Vec<f64>,
    se_performance: Vec<f64>,
    mean_synchrony: Vec<f64>,
    se_synchrony: Vec<f64>,
    terminal_performance_cv: f64,
}

/// Simulates one run with the given seed.
#[pyfunction]
fn run_once(py: Python<'_>, config: &ScenarioConfig, seed: u64) -> PyResult<RunResult> {
    let cfg = config.inner.clone();
    let r = py.detach(|| orgsync_core::run_once(&cfg, seed)).map_err(to_py)?;
    Ok(RunResult {
        seed: r.seed,
        performance: r.performance,
        synchrony: r.synchrony,
        final_state: list(&r.final_state),
        global_max: r.global_max,
    })
}

/// Runs `config.repetitions` runs on all cores and aggregates them.
#[pyfunction]
fn run_experiment(py: Python<'_>, config: &ScenarioConfig) -> PyResult<ExperimentResult> {
    let cfg = config.inner.clone();
    let r = py.detach(|| orgsync_core::run_experiment(&cfg)).map_err(to_py)?;
    Ok(ExperimentResult {
        config: ScenarioConfig { inner: r.config },
        runs: r.runs,
        run_seeds: r.run_seeds,
        mean_performance: r.mean_performance,
        se_performance: r.se_performance,
        mean_synchrony: r.mean_synchrony,
        se_synchrony: r.se_synchrony,
        terminal_performance_cv: r.terminal_performance_cv,
    })
}

/// Seed of repetition `index` under `master`.
#[pyfunction]
fn run_seed(master: u64, index: u64) -> u64 {
    seed::run_seed(master, index)
}

#[pyfunction]
fn hamming(u: Vec<u8>, v: Vec<u8>) -> PyResult<usize> {
    metrics::hamming(&bits(&u)?, &bits(&v)?).map_err(to_py)
}

fn organizational(x: &[u8], agents: usize) -> PyResult<(BitString, usize)> {
    let x = bits(x)?;
    if agents == 0 || x.len() % agents != 0 {
        return Err(PyValueError::new_err(format!(
            "vector of length {} does not split into {agents} blocks",
            x.len()
        )));
    }
    let n = x.len() / agents;
    Ok((x, n))
}

/// Sum of pairwise Hamming distances between the agents' blocks.
#[pyfunction]
#[pyo3(signature = (x, agents=5))]
fn asynchrony(x: Vec<u8>, agents: usize) -> PyResult<usize> {
    let (x, n) = organizational(&x, agents)?;
    Ok(metrics::asynchrony(&x, agents, n))
}

#[pyfunction]
fn max_asynchrony(agents: usize, tasks_per_agent: usize) -> usize {
    metrics::max_asynchrony(agents, tasks_per_agent)
}

/// 1 when all blocks agree, 0 at maximal disagreement.
#[pyfunction]
#[pyo3(signature = (x, agents=5))]
fn synchrony(x: Vec<u8>, agents: usize) -> PyResult<f64> {
    let (x, n) = organizational(&x, agents)?;
    Ok(metrics::synchrony(&x, agents, n))
}

#[pymodule]
fn orgsync(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", orgsync_core::output::TOOL_VERSION)?;
    m.add_class::<InteractionMatrix>()?;
    m.add_class::<LandscapeSet>()?;
    m.add_class::<Network>()?;
    m.add_class::<ScenarioConfig>()?;
    m.add_class::<RunResult>()?;
    m.add_class::<ExperimentResult>()?;
    m.add_function(wrap_pyfunction!(run_once, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_seed, m)?)?;
    m.add_function(wrap_pyfunction!(hamming, m)?)?;
    m.add_function(wrap_pyfunction!(asynchrony, m)?)?;
    m.add_function(wrap_pyfunction!(max_asynchrony, m)?)?;
    m.add_function(wrap_pyfunction!(synchrony, m)?)?;
    Ok(())
}
