//! Multi-ball semantics on acyclic switch graphs.
//!
//! Balls are dropped one at a time at the origin and follow the train rule
//! until they come to rest at a sink. Switch states persist between balls.
//! An arrival is an entry into a vertex from a different vertex, plus one
//! for every ball released at the origin; bounces on a self-loop are not
//! arrivals.
//!
//! The split at a vertex depends only on how many balls arrive there in
//! total, so the whole run can also be evaluated vertex by vertex in
//! topological order with exact big-integer counts.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::model::{DigicompInstance, ModelError, SwitchStates, VertexId};

pub const NAIVE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallCounts {
    pub arrivals: Vec<BigUint>,
    pub final_switches: SwitchStates,
}

impl BallCounts {
    pub fn arrivals_at(&self, v: VertexId) -> &BigUint {
        &self.arrivals[v.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigicompOutcome {
    /// Whether any ball ever entered the destination.
    pub reached: bool,
    pub counts: BallCounts,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DigicompError {
    #[error("budget of {budget} work units exhausted after {balls_done} balls")]
    BudgetExhausted { budget: u64, balls_done: u64 },
    #[error("graph has a cycle through vertices {0:?}")]
    NonAcyclic(Vec<VertexId>),
}

impl From<ModelError> for DigicompError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Cyclic(c) => DigicompError::NonAcyclic(c),
            other => unreachable!("unexpected model error {other}"),
        }
    }
}

/// Drops the balls one by one.
///
/// Every released ball and every step costs one unit of `budget`
/// (default [`NAIVE_BUDGET`]).
pub fn run_digicomp_naive(
    instance: &DigicompInstance,
    budget: Option<u64>,
) -> Result<DigicompOutcome, DigicompError> {
    let budget = budget.unwrap_or(NAIVE_BUDGET);
    let graph = instance.graph();
    graph.check_acyclic()?;

    let balls = match instance.balls().to_u64() {
        Some(b) => b,
        None => return Err(DigicompError::BudgetExhausted { budget, balls_done: 0 }),
    };

    let mut arrivals = vec![0u64; graph.len()];
    let mut switches = SwitchStates::zeros(graph.len());
    let mut work = 0u64;
    for ball in 0..balls {
        if work == budget {
            return Err(DigicompError::BudgetExhausted { budget, balls_done: ball });
        }
        work += 1;
        let mut pos = instance.origin();
        arrivals[pos.index()] += 1;
        while !graph.is_sink(pos) {
            if work == budget {
                return Err(DigicompError::BudgetExhausted { budget, balls_done: ball });
            }
            work += 1;
            let bit = switches.flip(pos.index());
            let next = graph.successor(pos, bit);
            if next != pos {
                arrivals[next.index()] += 1;
            }
            pos = next;
        }
    }

    let reached = arrivals[instance.destination().index()] > 0;
    Ok(DigicompOutcome {
        reached,
        counts: BallCounts {
            arrivals: arrivals.into_iter().map(BigUint::from).collect(),
            final_switches: switches,
        },
    })
}

/// Evaluates all balls at once along a topological order.
///
/// A vertex with two non-self exits that receives `c` balls sends
/// `ceil(c/2)` along `s0` and `floor(c/2)` along `s1` and ends in state
/// `c mod 2`. A vertex with one self-looping exit sends everything to its
/// other exit: with the loop on `s0` every ball bounces once and the switch
/// ends at 0; with the loop on `s1` only balls after the first bounce and
/// the switch ends at 1 once any ball has passed.
pub fn run_digicomp_fast(instance: &DigicompInstance) -> Result<DigicompOutcome, DigicompError> {
    let graph = instance.graph();
    let order = graph.topological_order()?;

    let mut arrivals = vec![BigUint::zero(); graph.len()];
    let mut switches = SwitchStates::zeros(graph.len());
    arrivals[instance.origin().index()] = instance.balls().clone();

    for v in order {
        let c = arrivals[v.index()].clone();
        if c.is_zero() {
            continue;
        }
        let (a, b) = (graph.s0(v), graph.s1(v));
        match (a == v, b == v) {
            (true, true) => {}
            (true, false) => arrivals[b.index()] += c,
            (false, true) => {
                switches.set(v.index(), true);
                arrivals[a.index()] += c;
            }
            (false, false) => {
                let (half, odd) = c.div_rem(&BigUint::from(2u8));
                if odd.is_one() {
                    switches.set(v.index(), true);
                    arrivals[a.index()] += &half + 1u8;
                } else {
                    arrivals[a.index()] += &half;
                }
                arrivals[b.index()] += half;
            }
        }
    }

    let reached = !arrivals[instance.destination().index()].is_zero();
    Ok(DigicompOutcome { reached, counts: BallCounts { arrivals, final_switches: switches } })
}

/// Final switch bit at `v`.
///
/// For a vertex with two distinct non-self exits this is the parity of the
/// number of balls that arrived there.
pub fn parity_diagnostic(counts: &BallCounts, v: VertexId) -> bool {
    counts.final_switches.get(v.index())
}
