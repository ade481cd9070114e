//! Single-train semantics with exact divergence detection.
//!
//! A configuration is the train position plus every switch bit, so there
//! are at most `n * 2^n` of them. The run is a deterministic walk through
//! that space: if a configuration repeats before the destination has been
//! entered, the destination is never entered.

use std::collections::HashMap;
use std::str::FromStr;

use crate::model::{ArrivalInstance, Configuration, SwitchGraph, VertexId};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

impl Configuration {
    /// Moves the train one step and returns the switch bit it consumed.
    #[inline]
    pub fn advance(&mut self, graph: &SwitchGraph) -> bool {
        let v = self.position;
        let bit = self.switches.flip(v.index());
        self.position = graph.successor(v, bit);
        bit
    }
}

pub fn step(config: &Configuration, graph: &SwitchGraph) -> Configuration {
    let mut next = config.clone();
    next.advance(graph);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Detector {
    /// Remembers every visited configuration.
    #[default]
    HashSet,
    /// Floyd's two-speed traversal; stores two configurations.
    ConstantMemory,
}

impl FromStr for Detector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hashset" => Ok(Detector::HashSet),
            "constant-memory" | "constant_memory" => Ok(Detector::ConstantMemory),
            other => Err(format!("unknown detector `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Arrives,
    Diverges,
}

/// A configuration seen after `earlier` steps and again after `later` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    pub configuration: Configuration,
    pub earlier: u64,
    pub later: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub verdict: Verdict,
    /// Steps to the first entry into the destination, or steps executed
    /// until the recurrence was found.
    pub steps: u64,
    pub witness: Option<Recurrence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ArrivalError {
    #[error("undecided after {steps} steps")]
    BudgetExhausted { steps: u64 },
}

pub fn run_arrival(
    instance: &ArrivalInstance,
    budget: Option<u64>,
    detector: Detector,
) -> Result<RunOutcome, ArrivalError> {
    let budget = budget.unwrap_or(DEFAULT_BUDGET);
    match detector {
        Detector::HashSet => run_with_hashset(instance, budget),
        Detector::ConstantMemory => run_with_floyd(instance, budget),
    }
}

fn arrived(steps: u64) -> RunOutcome {
    RunOutcome { verdict: Verdict::Arrives, steps, witness: None }
}

fn run_with_hashset(instance: &ArrivalInstance, budget: u64) -> Result<RunOutcome, ArrivalError> {
    let graph = &instance.graph;
    let mut config = Configuration::initial(graph, instance.origin);
    let mut seen: HashMap<Configuration, u64> = HashMap::new();
    let mut steps = 0u64;
    loop {
        if config.position == instance.destination {
            return Ok(arrived(steps));
        }
        if let Some(&earlier) = seen.get(&config) {
            return Ok(RunOutcome {
                verdict: Verdict::Diverges,
                steps,
                witness: Some(Recurrence { configuration: config, earlier, later: steps }),
            });
        }
        if steps == budget {
            return Err(ArrivalError::BudgetExhausted { steps });
        }
        seen.insert(config.clone(), steps);
        config.advance(graph);
        steps += 1;
    }
}

fn run_with_floyd(instance: &ArrivalInstance, budget: u64) -> Result<RunOutcome, ArrivalError> {
    let graph = &instance.graph;
    let mut tortoise = Configuration::initial(graph, instance.origin);
    let mut hare = tortoise.clone();
    if hare.position == instance.destination {
        return Ok(arrived(0));
    }
    let (mut slow, mut fast) = (0u64, 0u64);
    loop {
        // The hare visits every configuration in order, so it is the one
        // that watches for the destination.
        for _ in 0..2 {
            if fast == budget {
                return Err(ArrivalError::BudgetExhausted { steps: fast });
            }
            hare.advance(graph);
            fast += 1;
            if hare.position == instance.destination {
                return Ok(arrived(fast));
            }
        }
        tortoise.advance(graph);
        slow += 1;
        if tortoise == hare {
            return Ok(RunOutcome {
                verdict: Verdict::Diverges,
                steps: fast,
                witness: Some(Recurrence { configuration: tortoise, earlier: slow, later: fast }),
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry {
    pub position: VertexId,
    pub bit: bool,
}

/// The first `max_steps` moves of the run: where the train was and which
/// switch bit it consumed there.
pub fn trace_arrival(instance: &ArrivalInstance, max_steps: usize) -> Vec<TraceEntry> {
    let mut config = Configuration::initial(&instance.graph, instance.origin);
    (0..max_steps)
        .map(|_| {
            let position = config.position;
            let bit = config.advance(&instance.graph);
            TraceEntry { position, bit }
        })
        .collect()
}
