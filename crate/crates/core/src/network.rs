//! Directed information-sharing topologies.
//!
//! Agents are indexed `0..P`; agent 0 is the hub of the star and the head of
//! the line. An edge `(p, q)` means `q` receives `p`'s decisions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Hub broadcasts to every other agent and receives nothing.
    Star,
    /// Bidirectional ring: every agent exchanges with both neighbors.
    Ring,
    /// Single directed cycle `0 -> 1 -> ... -> P-1 -> 0`.
    Cycle,
    /// Directed path `0 -> 1 -> ... -> P-1`.
    Line,
}

impl Topology {
    pub const ALL: [Topology; 4] = [Topology::Star, Topology::Ring, Topology::Cycle, Topology::Line];

    pub fn name(&self) -> &'static str {
        match self {
            Topology::Star => "star",
            Topology::Ring => "ring",
            Topology::Cycle => "cycle",
            Topology::Line => "line",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "star" => Ok(Topology::Star),
            "ring" => Ok(Topology::Ring),
            "cycle" => Ok(Topology::Cycle),
            "line" => Ok(Topology::Line),
            other => Err(Error::config(
                "topology",
                format!("unknown topology {other:?} (expected star|ring|cycle|line)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    kind: Topology,
    agents: usize,
    edges: Vec<(usize, usize)>,
    senders: Vec<Vec<usize>>,
    receivers: Vec<Vec<usize>>,
}

impl Network {
    pub fn build(kind: Topology, agents: usize) -> Result<Self> {
        if agents < 3 {
            return Err(Error::config("agents", format!("networks need at least 3 agents, got {agents}")));
        }
        let p = agents;
        let mut edges: Vec<(usize, usize)> = match kind {
            Topology::Star => (1..p).map(|q| (0, q)).collect(),
            Topology::Line => (0..p - 1).map(|q| (q, q + 1)).collect(),
            Topology::Ring => (0..p).flat_map(|q| [(q, (q + 1) % p), ((q + 1) % p, q)]).collect(),
            Topology::Cycle => (0..p).map(|q| (q, (q + 1) % p)).collect(),
        };
        edges.sort_unstable();

        let mut senders = vec![Vec::new(); p];
        let mut receivers = vec![Vec::new(); p];
        for &(from, to) in &edges {
            senders[to].push(from);
            receivers[from].push(to);
        }
        Ok(Network {
            kind,
            agents,
            edges,
            senders,
            receivers,
        })
    }

    pub fn kind(&self) -> Topology {
        self.kind
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    /// Edges `(sender, receiver)` in ascending order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Agents whose decisions `agent` observes, ascending.
    pub fn in_neighbors(&self, agent: usize) -> &[usize] {
        &self.senders[agent]
    }

    /// Agents that observe `agent`'s decisions, ascending.
    pub fn out_neighbors(&self, agent: usize) -> &[usize] {
        &self.receivers[agent]
    }

    /// `reach[p][q]` is true when information from `p` eventually arrives at `q`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let p = self.agents;
        let mut reach = vec![vec![false; p]; p];
        for &(a, b) in &self.edges {
            reach[a][b] = true;
        }
        for k in 0..p {
            for i in 0..p {
                if reach[i][k] {
                    let via = reach[k].clone();
                    for (r, v) in reach[i].iter_mut().zip(via) {
                        *r |= v;
                    }
                }
            }
        }
        reach
    }
}
