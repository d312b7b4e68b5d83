//! Agents: decisions, bounded memory of peers' decisions, conformity-weighted
//! utility and one-bit hill climbing.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, DecisionVector};
use crate::error::{Error, Result};
use crate::landscape::LandscapeSet;

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Weights on own performance and on conformity; they sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preferences {
    performance: f64,
    conformity: f64,
}

impl Preferences {
    pub fn new(performance: f64, conformity: f64) -> Result<Self> {
        if !(performance >= 0.0 && conformity >= 0.0) {
            return Err(Error::config("weights", "weights must be non-negative"));
        }
        if (performance + conformity - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::config("weights", "weights must sum to 1"));
        }
        Ok(Preferences {
            performance,
            conformity,
        })
    }

    pub fn performance(&self) -> f64 {
        self.performance
    }

    pub fn conformity(&self) -> f64 {
        self.conformity
    }
}

/// A peer decision held in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryEntry {
    pub sender: usize,
    pub bits: BitString,
    pub received: u64,
}

#[derive(Debug, Clone)]
pub struct AgentState {
    index: usize,
    own: BitString,
    memory: VecDeque<MemoryEntry>,
    prefs: Preferences,
    memory_span: u64,
    warmup: bool,
}

impl AgentState {
    /// `memory_span` is the number of periods an observation is kept. With
    /// `warmup` set, conformity is zero for every period `t <= memory_span`.
    pub fn new(index: usize, own: BitString, prefs: Preferences, memory_span: u64, warmup: bool) -> Self {
        AgentState {
            index,
            own,
            memory: VecDeque::new(),
            prefs,
            memory_span,
            warmup,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn own_bits(&self) -> BitString {
        self.own
    }

    pub fn set_own_bits(&mut self, bits: BitString) {
        debug_assert_eq!(bits.len(), self.own.len());
        self.own = bits;
    }

    pub fn preferences(&self) -> Preferences {
        self.prefs
    }

    pub fn memory(&self) -> impl ExactSizeIterator<Item = &MemoryEntry> {
        self.memory.iter()
    }

    /// Stores the decisions shared with this agent in period `t` and forgets
    /// everything received `memory_span` or more periods ago.
    pub fn observe(&mut self, shared: &[(usize, BitString)], t: u64) -> Result<()> {
        let n = self.own.len();
        if let Some((_, bad)) = shared.iter().find(|(_, bits)| bits.len() != n) {
            return Err(Error::Length {
                expected: n,
                found: bad.len(),
            });
        }
        self.memory.extend(shared.iter().map(|&(sender, bits)| MemoryEntry {
            sender,
            bits,
            received: t,
        }));
        while let Some(front) = self.memory.front() {
            if t.saturating_sub(front.received) >= self.memory_span {
                self.memory.pop_front();
            } else {
                break;
            }
        }
        Ok(())
    }

    /// Mean fraction of positions at which `candidate` matches the remembered
    /// decisions. Zero with an empty memory and, under warm-up, for
    /// `t <= memory_span`.
    pub fn conformity(&self, candidate: &BitString, t: u64) -> f64 {
        if (self.warmup && t <= self.memory_span) || self.memory.is_empty() {
            return 0.0;
        }
        let n = candidate.len();
        let matches: usize = self
            .memory
            .iter()
            .map(|e| n - (candidate.word() ^ e.bits.word()).count_ones() as usize)
            .sum();
        matches as f64 / (self.memory.len() * n) as f64
    }

    /// Weighted sum of performance and conformity of `candidate`, evaluated
    /// with every other agent's decisions taken from `context`.
    pub fn utility(&self, ls: &LandscapeSet, context: &DecisionVector, candidate: &BitString, t: u64) -> f64 {
        let mut u = 0.0;
        if self.prefs.performance > 0.0 {
            let x = context.with_block(self.index, candidate);
            u += self.prefs.performance * ls.agent_performance(&x, self.index);
        }
        if self.prefs.conformity > 0.0 {
            u += self.prefs.conformity * self.conformity(candidate, t);
        }
        u
    }

    /// Own decisions with one uniformly chosen bit flipped.
    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let i = rng.random_range(0..self.own.len());
        self.own.flipped(i)
    }

    /// Keeps the status quo unless `proposal` has strictly higher utility.
    pub fn decide(&self, ls: &LandscapeSet, proposal: &BitString, context: &DecisionVector, t: u64) -> BitString {
        let current = self.utility(ls, context, &self.own, t);
        let candidate = self.utility(ls, context, proposal, t);
        if candidate > current {
            *proposal
        } else {
            self.own
        }
    }
}
