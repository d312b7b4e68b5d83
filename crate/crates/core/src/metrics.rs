//! Hamming distance, asynchrony and synchrony of decision vectors.

use crate::bits::{BitString, DecisionVector};
use crate::error::Result;

/// Number of positions at which `u` and `v` differ.
pub fn hamming(u: &BitString, v: &BitString) -> Result<usize> {
    u.hamming(v)
}

/// Sum of Hamming distances over all unordered pairs of agent blocks.
pub fn asynchrony(x: &DecisionVector, agents: usize, tasks_per_agent: usize) -> usize {
    debug_assert_eq!(x.len(), agents * tasks_per_agent);
    let blocks: Vec<u64> = (0..agents).map(|p| x.block(p, tasks_per_agent).word()).collect();
    let mut total = 0;
    for p in 0..agents {
        for q in p + 1..agents {
            total += (blocks[p] ^ blocks[q]).count_ones() as usize;
        }
    }
    total
}

/// Largest possible asynchrony: each position contributes at most
/// `floor(P/2) * ceil(P/2)` discordant pairs.
pub fn max_asynchrony(agents: usize, tasks_per_agent: usize) -> usize {
    tasks_per_agent * (agents / 2) * agents.div_ceil(2)
}

/// `1 - asynchrony / max_asynchrony`, in `[0, 1]`. A single agent is
/// trivially synchronous.
pub fn synchrony(x: &DecisionVector, agents: usize, tasks_per_agent: usize) -> f64 {
    let max = max_asynchrony(agents, tasks_per_agent);
    if max == 0 {
        return 1.0;
    }
    1.0 - asynchrony(x, agents, tasks_per_agent) as f64 / max as f64
}
