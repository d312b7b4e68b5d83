//! NKCS task environments.
//!
//! An organization of `P` agents owns `M = P * N` binary tasks. The
//! contribution of each task depends on its own decision, on `K` other tasks
//! of the same agent and on `C` tasks of each of `S` other agents. Contribution
//! tables are drawn from a Gaussian copula so that homologous tables of
//! different agents are correlated with Pearson coefficient `rho`.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::bits::{BitString, DecisionVector, MAX_BITS};
use crate::error::{Error, Result};
use crate::seed::{rng_from, stream};

/// Largest supported number of coupled decisions per contribution table
/// (own bit included).
pub const MAX_TABLE_BITS: usize = 24;

/// Default limit on `M` for the exhaustive global-maximum search.
pub const DEFAULT_ENUMERATION_BITS: usize = 26;

const MAX_PERMUTATION_TRIES: usize = 1_000;
const MAX_RESTARTS: usize = 1_000;

/// Shape of the task environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NkcsParams {
    /// Number of agents `P`.
    pub agents: usize,
    /// Tasks per agent `N`.
    pub tasks_per_agent: usize,
    /// Internal couplings per task `K`.
    pub internal: usize,
    /// Couplings per task into each coupled agent `C`.
    pub external: usize,
    /// Number of coupled agents `S`.
    pub coupled_agents: usize,
}

impl NkcsParams {
    pub fn new(agents: usize, tasks_per_agent: usize, internal: usize, external: usize, coupled_agents: usize) -> Self {
        NkcsParams {
            agents,
            tasks_per_agent,
            internal,
            external,
            coupled_agents,
        }
    }

    /// Total number of tasks `M`.
    pub fn tasks(&self) -> usize {
        self.agents * self.tasks_per_agent
    }

    /// Number of other tasks each contribution depends on, `K + C*S`.
    pub fn couplings(&self) -> usize {
        self.internal + self.external * self.coupled_agents
    }

    /// Rows in every contribution table, `2^(1 + K + C*S)`.
    pub fn rows_per_task(&self) -> usize {
        1 << (1 + self.couplings())
    }

    pub fn validate(&self) -> Result<()> {
        let NkcsParams {
            agents,
            tasks_per_agent: n,
            internal: k,
            external: c,
            coupled_agents: s,
        } = *self;
        if agents == 0 {
            return Err(Error::config("agents", "must be at least 1"));
        }
        if n == 0 {
            return Err(Error::config("tasks_per_agent", "must be at least 1"));
        }
        if self.tasks() > MAX_BITS {
            return Err(Error::config(
                "tasks_per_agent",
                format!("agents * tasks_per_agent = {} exceeds {MAX_BITS}", self.tasks()),
            ));
        }
        if k > n - 1 {
            return Err(Error::config("K", format!("K = {k} exceeds N - 1 = {}", n - 1)));
        }
        if c > n {
            return Err(Error::config("C", format!("C = {c} exceeds N = {n}")));
        }
        if s > agents - 1 {
            return Err(Error::config("S", format!("S = {s} exceeds P - 1 = {}", agents - 1)));
        }
        if 1 + self.couplings() > MAX_TABLE_BITS {
            return Err(Error::config(
                "K, C, S",
                format!("1 + K + C*S = {} exceeds {MAX_TABLE_BITS}", 1 + self.couplings()),
            ));
        }
        Ok(())
    }
}

/// Draws `count` permutations of `0..size` that pairwise never map an element
/// to the same image, i.e. whose permutation matrices are disjoint. With
/// `forbid_fixed_points` the identity cells are also excluded.
///
/// Rejection sampling with restarts; if that keeps failing, a randomly relabeled
/// circulant construction is used, which always exists for feasible inputs.
pub(crate) fn disjoint_permutations<R: Rng + ?Sized>(
    size: usize,
    count: usize,
    forbid_fixed_points: bool,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let capacity = if forbid_fixed_points { size.saturating_sub(1) } else { size };
    assert!(count <= capacity, "cannot place {count} disjoint permutations on {size} elements");
    if count == 0 {
        return Vec::new();
    }

    'restart: for _ in 0..MAX_RESTARTS {
        let mut taken = vec![false; size * size];
        if forbid_fixed_points {
            for i in 0..size {
                taken[i * size + i] = true;
            }
        }
        let mut perms = Vec::with_capacity(count);
        let mut candidate: Vec<usize> = (0..size).collect();
        for _ in 0..count {
            let mut found = false;
            for _ in 0..MAX_PERMUTATION_TRIES {
                candidate.shuffle(rng);
                if candidate.iter().enumerate().all(|(i, &j)| !taken[i * size + j]) {
                    found = true;
                    break;
                }
            }
            if !found {
                continue 'restart;
            }
            for (i, &j) in candidate.iter().enumerate() {
                taken[i * size + j] = true;
            }
            perms.push(candidate.clone());
        }
        return perms;
    }

    // Circulant fallback: relabel elements by a random permutation and use
    // distinct cyclic shifts.
    let mut labels: Vec<usize> = (0..size).collect();
    labels.shuffle(rng);
    let mut shifts: Vec<usize> = if forbid_fixed_points { (1..size).collect() } else { (0..size).collect() };
    shifts.shuffle(rng);
    shifts
        .into_iter()
        .take(count)
        .map(|shift| {
            let mut perm = vec![0; size];
            for u in 0..size {
                perm[labels[u]] = labels[(u + shift) % size];
            }
            perm
        })
        .collect()
}

/// Per-position dependency pattern of one block: for each within-block task
/// position, the internal positions it reads and, per coupling slot, the
/// positions it reads in the slot's foreign block.
#[derive(Debug, Clone)]
struct BlockPattern {
    internal: Vec<Vec<usize>>,
    external: Vec<Vec<Vec<usize>>>,
}

impl BlockPattern {
    fn sample<R: Rng + ?Sized>(params: &NkcsParams, rng: &mut R) -> Self {
        let n = params.tasks_per_agent;
        let internal = columns_by_row(n, &disjoint_permutations(n, params.internal, true, rng));
        let external = (0..params.coupled_agents)
            .map(|_| columns_by_row(n, &disjoint_permutations(n, params.external, false, rng)))
            .collect();
        BlockPattern { internal, external }
    }
}

fn columns_by_row(size: usize, perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    (0..size)
        .map(|row| {
            let mut cols: Vec<usize> = perms.iter().map(|p| p[row]).collect();
            cols.sort_unstable();
            cols
        })
        .collect()
}

/// The `M x M` coupling structure. Cell `(i, j)` is set when the contribution
/// of task `i` depends on decision `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionMatrix {
    params: NkcsParams,
    homologous: bool,
    cells: Vec<bool>,
    /// Coupled tasks of each task in table-index order (own task excluded).
    deps: Vec<Vec<usize>>,
    /// Foreign blocks of each block in slot order.
    partners: Vec<Vec<usize>>,
}

impl InteractionMatrix {
    /// Builds a random regular interaction structure.
    ///
    /// With `homologous` set, one internal pattern and one pattern per coupling
    /// slot are drawn and shared by all agents, so that the same table row
    /// means the same configuration for every agent. Otherwise each agent draws
    /// its own patterns.
    pub fn build<R: Rng + ?Sized>(params: NkcsParams, homologous: bool, rng: &mut R) -> Result<Self> {
        params.validate()?;
        let p_count = params.agents;
        let n = params.tasks_per_agent;
        let m = params.tasks();

        let block_graph = disjoint_permutations(p_count, params.coupled_agents, true, rng);
        let partners: Vec<Vec<usize>> = (0..p_count)
            .map(|p| block_graph.iter().map(|perm| perm[p]).collect())
            .collect();

        let patterns: Vec<BlockPattern> = if homologous {
            vec![BlockPattern::sample(&params, rng); p_count]
        } else {
            (0..p_count).map(|_| BlockPattern::sample(&params, rng)).collect()
        };

        let mut deps = Vec::with_capacity(m);
        for (p, pattern) in patterns.iter().enumerate() {
            for a in 0..n {
                let mut d: Vec<usize> = pattern.internal[a].iter().map(|&b| p * n + b).collect();
                for (slot, &q) in partners[p].iter().enumerate() {
                    d.extend(pattern.external[slot][a].iter().map(|&b| q * n + b));
                }
                deps.push(d);
            }
        }

        let mut cells = vec![false; m * m];
        for (i, d) in deps.iter().enumerate() {
            cells[i * m + i] = true;
            for &j in d {
                cells[i * m + j] = true;
            }
        }

        Ok(InteractionMatrix {
            params,
            homologous,
            cells,
            deps,
            partners,
        })
    }

    /// The structure `LandscapeSet::from_seed` builds for the same seed.
    pub fn from_seed(params: NkcsParams, homologous: bool, seed: u64) -> Result<Self> {
        Self::build(params, homologous, &mut rng_from(seed, &[stream::STRUCTURE]))
    }

    pub fn params(&self) -> &NkcsParams {
        &self.params
    }

    pub fn homologous(&self) -> bool {
        self.homologous
    }

    pub fn size(&self) -> usize {
        self.params.tasks()
    }

    /// Whether the contribution of task `i` depends on decision `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.size() + j]
    }

    /// Coupled tasks of `task` in the order they enter the table row index,
    /// after the task's own bit.
    pub fn dependencies(&self, task: usize) -> &[usize] {
        &self.deps[task]
    }

    /// Foreign blocks that `agent`'s tasks depend on, in coupling-slot order.
    pub fn partners(&self, agent: usize) -> &[usize] {
        &self.partners[agent]
    }

    pub fn row_sum(&self, i: usize) -> usize {
        (0..self.size()).filter(|&j| self.get(i, j)).count()
    }

    pub fn column_sum(&self, j: usize) -> usize {
        (0..self.size()).filter(|&i| self.get(i, j)).count()
    }

    /// Table row of `task` for decision vector `x`: the task's own bit is the
    /// most significant, followed by the coupled bits in dependency order.
    #[inline]
    pub fn row_index(&self, x: &DecisionVector, task: usize) -> usize {
        let own = ((x.word() >> task) & 1) as usize;
        self.deps[task]
            .iter()
            .fold(own, |idx, &j| (idx << 1) | ((x.word() >> j) & 1) as usize)
    }
}

/// Maps equicorrelated standard normals to uniforms so that the uniforms have
/// pairwise Pearson correlation `rho`.
#[derive(Debug, Clone, Copy)]
pub struct CorrelatedUniforms {
    common: f64,
    idiosyncratic: f64,
}

impl CorrelatedUniforms {
    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::config("rho", format!("{rho} is outside [0, 1]")));
        }
        let r = Self::normal_correlation(rho);
        Ok(CorrelatedUniforms {
            common: r.sqrt(),
            idiosyncratic: (1.0 - r).max(0.0).sqrt(),
        })
    }

    /// Correlation of the latent normals whose CDF-transformed uniforms have
    /// Pearson correlation `rho`.
    pub fn normal_correlation(rho: f64) -> f64 {
        if rho >= 1.0 {
            return 1.0;
        }
        (2.0 * (std::f64::consts::PI * rho / 6.0).sin()).clamp(0.0, 1.0)
    }

    /// Fills `out` with one correlated draw per element.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let shared: f64 = rng.sample(StandardNormal);
        for v in out.iter_mut() {
            let own: f64 = rng.sample(StandardNormal);
            let z = self.common * shared + self.idiosyncratic * own;
            *v = standard_normal_cdf(z).clamp(0.0, 1.0);
        }
    }
}

#[inline]
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Draws the contribution tables for `im`, task-major and row-minor.
///
/// For every within-block position and table row, one correlated draw is made
/// across all agents.
pub fn draw_contributions<R: Rng + ?Sized>(im: &InteractionMatrix, rho: f64, rng: &mut R) -> Result<Vec<f64>> {
    let sampler = CorrelatedUniforms::new(rho)?;
    let params = im.params();
    let (p_count, n, rows) = (params.agents, params.tasks_per_agent, params.rows_per_task());
    let mut values = vec![0.0; params.tasks() * rows];
    let mut draw = vec![0.0; p_count];
    for a in 0..n {
        for row in 0..rows {
            sampler.sample_into(rng, &mut draw);
            for (p, &u) in draw.iter().enumerate() {
                values[(p * n + a) * rows + row] = u;
            }
        }
    }
    Ok(values)
}

/// Contribution tables together with the exhaustively enumerated optimum of
/// organizational performance.
#[derive(Debug, Clone)]
pub struct LandscapeSet {
    im: InteractionMatrix,
    rho: f64,
    seed: Option<u64>,
    values: Vec<f64>,
    global_max: f64,
    global_argmax: DecisionVector,
}

impl LandscapeSet {
    /// Draws correlated tables for `im` and enumerates the global maximum.
    pub fn generate<R: Rng + ?Sized>(im: InteractionMatrix, rho: f64, rng: &mut R) -> Result<Self> {
        let values = draw_contributions(&im, rho, rng)?;
        Self::from_tables(im, rho, values, DEFAULT_ENUMERATION_BITS)
    }

    /// Builds the interaction structure and tables from a single seed. This is
    /// the generation path used by simulation runs and landscape dumps.
    pub fn from_seed(params: NkcsParams, homologous: bool, rho: f64, seed: u64, enumeration_bits: usize) -> Result<Self> {
        let im = InteractionMatrix::from_seed(params, homologous, seed)?;
        let values = draw_contributions(&im, rho, &mut rng_from(seed, &[stream::CONTRIBUTIONS]))?;
        let mut ls = Self::from_tables(im, rho, values, enumeration_bits)?;
        ls.seed = Some(seed);
        Ok(ls)
    }

    /// Wraps explicit tables (task-major, row-minor) and enumerates the global
    /// maximum.
    pub fn from_tables(im: InteractionMatrix, rho: f64, values: Vec<f64>, enumeration_bits: usize) -> Result<Self> {
        let expected = im.size() * im.params().rows_per_task();
        if values.len() != expected {
            return Err(Error::Format(format!("expected {expected} table values, found {}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Format(format!("contribution {v} is outside [0, 1]")));
        }
        let mut ls = LandscapeSet {
            im,
            rho,
            seed: None,
            values,
            global_max: f64::NAN,
            global_argmax: BitString::zeros(0),
        };
        let (max, argmax) = ls.enumerate_global_max(enumeration_bits)?;
        ls.global_max = max;
        ls.global_argmax = argmax;
        Ok(ls)
    }

    pub fn interactions(&self) -> &InteractionMatrix {
        &self.im
    }

    pub fn params(&self) -> &NkcsParams {
        self.im.params()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn global_max(&self) -> f64 {
        self.global_max
    }

    pub fn global_argmax(&self) -> DecisionVector {
        self.global_argmax
    }

    /// Contribution table of `task`, indexed by row.
    pub fn table(&self, task: usize) -> &[f64] {
        let rows = self.params().rows_per_task();
        &self.values[task * rows..(task + 1) * rows]
    }

    /// All table values, task-major and row-minor.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn contribution(&self, x: &DecisionVector, task: usize) -> f64 {
        self.table(task)[self.im.row_index(x, task)]
    }

    /// Mean contribution of the tasks in block `agent`.
    pub fn agent_performance(&self, x: &DecisionVector, agent: usize) -> f64 {
        let n = self.params().tasks_per_agent;
        let sum: f64 = (agent * n..(agent + 1) * n).map(|i| self.contribution(x, i)).sum();
        sum / n as f64
    }

    /// Mean of all agents' performances.
    pub fn org_performance(&self, x: &DecisionVector) -> f64 {
        let p_count = self.params().agents;
        let total: f64 = (0..p_count).map(|p| self.agent_performance(x, p)).sum();
        total / p_count as f64
    }

    /// `org_performance(x) / global_max`.
    pub fn normalized_performance(&self, x: &DecisionVector) -> Result<f64> {
        if self.global_max <= 0.0 {
            return Err(Error::DegenerateLandscape(self.global_max));
        }
        Ok(self.org_performance(x) / self.global_max)
    }

    /// Exact maximum of organizational performance over all `2^M` decision
    /// vectors; ties go to the lexicographically lowest vector.
    ///
    /// The search walks a Gray code so each step flips one decision and only
    /// the tables reading that decision are re-indexed. Performance at each
    /// state is summed in the same order as [`Self::org_performance`], so the
    /// reported maximum equals `org_performance(argmax)` exactly.
    pub fn enumerate_global_max(&self, enumeration_bits: usize) -> Result<(f64, DecisionVector)> {
        let m = self.im.size();
        if m > enumeration_bits {
            return Err(Error::config(
                "enumeration_bits",
                format!("2^{m} states exceed the enumeration budget of 2^{enumeration_bits}"),
            ));
        }
        let walker = GrayWalker::new(self);
        let high_bits = m.min(6);
        let low_bits = m - high_bits;
        let best = (0..1u64 << high_bits)
            .into_par_iter()
            .map(|high| walker.best_in_chunk(high << low_bits, low_bits))
            .reduce(|| Candidate::NONE, Candidate::better);
        Ok((best.value, BitString::from_word(best.word, m)))
    }

    /// Writes a binary dump: magic, `P N K C S` and a flags word as `u32`,
    /// `rho` as `f64`, the seed as `u64`, then every table value as `f64`,
    /// task-major and row-minor. All fields are little-endian.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        let seed = self
            .seed
            .ok_or_else(|| Error::Format("only seeded landscapes can be dumped".into()))?;
        let io = |e| Error::io("<landscape dump>", e);
        let p = self.params();
        w.write_all(DUMP_MAGIC).map_err(io)?;
        for field in [p.agents, p.tasks_per_agent, p.internal, p.external, p.coupled_agents] {
            w.write_all(&(field as u32).to_le_bytes()).map_err(io)?;
        }
        w.write_all(&(self.im.homologous() as u32).to_le_bytes()).map_err(io)?;
        w.write_all(&self.rho.to_le_bytes()).map_err(io)?;
        w.write_all(&seed.to_le_bytes()).map_err(io)?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes()).map_err(io)?;
        }
        Ok(())
    }

    /// Reads a dump written by [`Self::write_dump`]. The interaction structure
    /// is rebuilt from the stored seed; table values are taken from the file.
    pub fn read_dump<R: Read>(mut r: R, enumeration_bits: usize) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf).map_err(|e| Error::io("<landscape dump>", e))?;
        let mut cur = DumpCursor { buf: &buf, pos: 0 };
        if cur.take(DUMP_MAGIC.len())? != DUMP_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let mut fields = [0usize; 6];
        for f in fields.iter_mut() {
            *f = u32::from_le_bytes(cur.take(4)?.try_into().unwrap()) as usize;
        }
        let rho = f64::from_le_bytes(cur.take(8)?.try_into().unwrap());
        let seed = u64::from_le_bytes(cur.take(8)?.try_into().unwrap());
        let params = NkcsParams::new(fields[0], fields[1], fields[2], fields[3], fields[4]);
        let homologous = fields[5] & 1 == 1;
        let im = InteractionMatrix::from_seed(params, homologous, seed)?;
        let rest = &buf[cur.pos..];
        if rest.len() % 8 != 0 {
            return Err(Error::Format("trailing bytes after table values".into()));
        }
        let values = rest
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let mut ls = Self::from_tables(im, rho, values, enumeration_bits)?;
        ls.seed = Some(seed);
        Ok(ls)
    }
}

const DUMP_MAGIC: &[u8; 8] = b"NKCSLND1";

struct DumpCursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> DumpCursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos + len;
        let out = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("truncated header".into()))?;
        self.pos = end;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    value: f64,
    word: u64,
    key: u64,
}

impl Candidate {
    const NONE: Candidate = Candidate {
        value: f64::NEG_INFINITY,
        word: 0,
        key: u64::MAX,
    };

    fn better(a: Candidate, b: Candidate) -> Candidate {
        if b.value > a.value || (b.value == a.value && b.key < a.key) {
            b
        } else {
            a
        }
    }
}

/// Incremental evaluator for the Gray-code enumeration.
struct GrayWalker<'a> {
    ls: &'a LandscapeSet,
    /// For each decision bit: (task, mask to toggle in that task's row index).
    readers: Vec<Vec<(usize, usize)>>,
    /// For each decision bit: blocks whose performance changes when it flips.
    blocks: Vec<Vec<usize>>,
}

impl<'a> GrayWalker<'a> {
    fn new(ls: &'a LandscapeSet) -> Self {
        let im = &ls.im;
        let m = im.size();
        let n = im.params().tasks_per_agent;
        let mut readers = vec![Vec::new(); m];
        for task in 0..m {
            let d = im.dependencies(task);
            readers[task].push((task, 1 << d.len()));
            for (pos, &j) in d.iter().enumerate() {
                readers[j].push((task, 1 << (d.len() - 1 - pos)));
            }
        }
        let blocks = readers
            .iter()
            .map(|r| {
                let mut b: Vec<usize> = r.iter().map(|&(task, _)| task / n).collect();
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        GrayWalker { ls, readers, blocks }
    }

    fn best_in_chunk(&self, base: u64, low_bits: usize) -> Candidate {
        let ls = self.ls;
        let params = ls.params();
        let (m, n, p_count) = (params.tasks(), params.tasks_per_agent, params.agents);
        let rows = params.rows_per_task();

        let mut word = base;
        let x = BitString::from_word(word, m);
        let mut index: Vec<usize> = (0..m).map(|i| ls.im.row_index(&x, i)).collect();
        let mut contrib: Vec<f64> = (0..m).map(|i| ls.values[i * rows + index[i]]).collect();
        let block_perf = |contrib: &[f64], p: usize| -> f64 {
            let sum: f64 = contrib[p * n..(p + 1) * n].iter().sum();
            sum / n as f64
        };
        let mut perf: Vec<f64> = (0..p_count).map(|p| block_perf(&contrib, p)).collect();
        let total = |perf: &[f64]| perf.iter().sum::<f64>() / p_count as f64;

        let mut best = Candidate {
            value: total(&perf),
            word,
            key: BitString::lex_key(word, m),
        };
        for step in 1..(1u64 << low_bits) {
            let bit = step.trailing_zeros() as usize;
            word ^= 1 << bit;
            for &(task, toggle) in &self.readers[bit] {
                index[task] ^= toggle;
                contrib[task] = ls.values[task * rows + index[task]];
            }
            for &p in &self.blocks[bit] {
                perf[p] = block_perf(&contrib, p);
            }
            let value = total(&perf);
            if value >= best.value {
                best = Candidate::better(
                    best,
                    Candidate {
                        value,
                        word,
                        key: BitString::lex_key(word, m),
                    },
                );
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::SimRng;
    use rand::SeedableRng;

    fn rng(seed: u64) -> SimRng {
        SimRng::seed_from_u64(seed)
    }

    fn benchmark(k: usize, c: usize, s: usize) -> NkcsParams {
        NkcsParams::new(5, 4, k, c, s)
    }

    #[test]
    fn full_internal_coupling_is_block_diagonal() {
        let im = InteractionMatrix::build(benchmark(3, 0, 0), true, &mut rng(1)).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                assert_eq!(im.get(i, j), i / 4 == j / 4, "cell ({i},{j})");
            }
        }
    }

    #[test]
    fn no_coupling_is_identity() {
        let im = InteractionMatrix::build(benchmark(0, 0, 0), true, &mut rng(2)).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                assert_eq!(im.get(i, j), i == j);
            }
        }
    }

    #[test]
    fn external_regime_is_regular_with_block_structure() {
        for seed in 0..50 {
            for homologous in [true, false] {
                let im = InteractionMatrix::build(benchmark(2, 2, 2), homologous, &mut rng(seed)).unwrap();
                for i in 0..20 {
                    assert_eq!(im.row_sum(i), 7);
                    assert_eq!(im.column_sum(i), 7);
                    assert!(im.get(i, i));
                    let own = i / 4;
                    let inside = (0..20).filter(|&j| j != i && j / 4 == own && im.get(i, j)).count();
                    assert_eq!(inside, 2);
                    let mut per_block = [0usize; 5];
                    for j in (0..20).filter(|&j| j / 4 != own && im.get(i, j)) {
                        per_block[j / 4] += 1;
                    }
                    let coupled: Vec<usize> = per_block.iter().copied().filter(|&c| c > 0).collect();
                    assert_eq!(coupled, vec![2, 2]);
                }
            }
        }
    }

    #[test]
    fn rejects_infeasible_parameters() {
        for bad in [benchmark(4, 0, 0), benchmark(2, 5, 1), benchmark(2, 1, 5), NkcsParams::new(0, 4, 0, 0, 0)] {
            let err = InteractionMatrix::build(bad, true, &mut rng(0)).unwrap_err();
            assert!(matches!(err, Error::Config { .. }), "{bad:?}: {err}");
        }
    }

    #[test]
    fn disjoint_permutations_fill_all_off_diagonal_cells() {
        let perms = disjoint_permutations(6, 5, true, &mut rng(3));
        let mut seen = [false; 36];
        for p in &perms {
            for (i, &j) in p.iter().enumerate() {
                assert_ne!(i, j);
                assert!(!seen[i * 6 + j]);
                seen[i * 6 + j] = true;
            }
        }
    }

    #[test]
    fn homologous_tasks_share_row_meaning() {
        let im = InteractionMatrix::build(benchmark(2, 2, 2), true, &mut rng(9)).unwrap();
        for a in 0..4 {
            let reference: Vec<usize> = im.dependencies(a).iter().map(|j| j % 4).collect();
            for p in 1..5 {
                let other: Vec<usize> = im.dependencies(p * 4 + a).iter().map(|j| j % 4).collect();
                assert_eq!(reference, other);
            }
        }
    }

    #[test]
    fn perfect_correlation_gives_identical_tables() {
        let im = InteractionMatrix::build(benchmark(2, 2, 2), true, &mut rng(4)).unwrap();
        let ls = LandscapeSet::generate(im, 1.0, &mut rng(5)).unwrap();
        for a in 0..4 {
            for p in 1..5 {
                assert_eq!(ls.table(a), ls.table(p * 4 + a));
            }
        }
    }

    #[test]
    fn rho_out_of_range_is_rejected() {
        let im = InteractionMatrix::build(benchmark(3, 0, 0), true, &mut rng(4)).unwrap();
        assert!(draw_contributions(&im, 1.5, &mut rng(1)).is_err());
        assert!(draw_contributions(&im, -0.1, &mut rng(1)).is_err());
    }

    #[test]
    fn independent_tables_are_uncorrelated() {
        let params = benchmark(3, 0, 0);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for seed in 0..200 {
            let im = InteractionMatrix::build(params, true, &mut rng(seed)).unwrap();
            let v = draw_contributions(&im, 0.0, &mut rng(100 + seed)).unwrap();
            for a in 0..4 {
                for row in 0..16 {
                    xs.push(v[a * 16 + row]);
                    ys.push(v[(4 + a) * 16 + row]);
                }
            }
        }
        assert!(xs.len() >= 10_000);
        assert!(crate::stats::pearson(&xs, &ys).abs() < 0.03);
    }

    fn toy_matrix() -> InteractionMatrix {
        // M = 2 as one agent with two coupled tasks.
        InteractionMatrix::build(NkcsParams::new(1, 2, 1, 0, 0), true, &mut rng(0)).unwrap()
    }

    #[test]
    fn toy_landscape_maximum_by_hand() {
        let im = toy_matrix();
        // Task 0 rows: (x0, x1); task 1 rows: (x1, x0).
        let values = vec![0.1, 0.9, 0.4, 0.2, 0.3, 0.8, 0.5, 0.6];
        let ls = LandscapeSet::from_tables(im, 0.0, values, 26).unwrap();
        let states = ["00", "10", "01", "11"];
        let perf: Vec<f64> = states.iter().map(|s| ls.org_performance(&s.parse().unwrap())).collect();
        // 00 -> (0.1 + 0.3)/2, 10 -> (0.4 + 0.8)/2, 01 -> (0.9 + 0.5)/2, 11 -> (0.2 + 0.6)/2
        let expected = [0.2, 0.6, 0.7, 0.4];
        for (got, want) in perf.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(ls.global_argmax().to_string(), "01");
        assert_eq!(ls.global_max(), perf[2]);
    }

    #[test]
    fn constant_landscape_returns_all_zeros() {
        let im = InteractionMatrix::build(benchmark(2, 2, 2), true, &mut rng(6)).unwrap();
        let rows = im.params().rows_per_task();
        let ls = LandscapeSet::from_tables(im, 0.9, vec![0.37; 20 * rows], 26).unwrap();
        assert_eq!(ls.global_max(), 0.37);
        assert_eq!(ls.global_argmax(), BitString::zeros(20));
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let im = InteractionMatrix::build(benchmark(3, 0, 0), true, &mut rng(6)).unwrap();
        let values = draw_contributions(&im, 0.9, &mut rng(1)).unwrap();
        let err = LandscapeSet::from_tables(im, 0.9, values, 16).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn zero_landscape_cannot_be_normalized() {
        let ls = LandscapeSet::from_tables(toy_matrix(), 0.0, vec![0.0; 8], 26).unwrap();
        assert!(matches!(
            ls.normalized_performance(&BitString::zeros(2)),
            Err(Error::DegenerateLandscape(_))
        ));
    }

    #[test]
    fn dump_round_trip() {
        let ls = LandscapeSet::from_seed(benchmark(2, 2, 2), true, 0.9, 77, 26).unwrap();
        let mut buf = Vec::new();
        ls.write_dump(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 6 * 4 + 8 + 8 + 20 * 128 * 8);
        let back = LandscapeSet::read_dump(buf.as_slice(), 26).unwrap();
        assert_eq!(back.values(), ls.values());
        assert_eq!(back.interactions(), ls.interactions());
        assert_eq!(back.global_max(), ls.global_max());
        assert_eq!(back.global_argmax(), ls.global_argmax());
        assert!(LandscapeSet::read_dump(&buf[..20], 26).is_err());
    }
}
