//! Directed acyclic multigraphs with a path-count threshold.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::model::{check_endpoint, ModelError, VertexId};
use crate::topo;

/// Does `graph` have at least `threshold` paths from `source` to `sink`?
///
/// Parallel edges are allowed and count as distinct paths. Self-loops are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagInstance {
    successors: Vec<Vec<VertexId>>,
    source: VertexId,
    sink: VertexId,
    threshold: BigUint,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PathCountError {
    #[error("path enumeration exceeded its budget of {0} explored walks")]
    BudgetExceeded(u64),
}

/// Default walk budget for [`DagInstance::count_paths_bruteforce`].
pub const BRUTEFORCE_BUDGET: u64 = 1_000_000;

impl DagInstance {
    pub fn new(
        successors: Vec<Vec<VertexId>>,
        source: VertexId,
        sink: VertexId,
        threshold: BigUint,
    ) -> Result<Self, ModelError> {
        let n = successors.len();
        check_endpoint("source", source, n)?;
        check_endpoint("sink", sink, n)?;
        for (v, succ) in successors.iter().enumerate() {
            for &w in succ {
                if w.index() >= n {
                    return Err(ModelError::DanglingReference { vertex: v, target: w.index(), n });
                }
                if w.index() == v {
                    return Err(ModelError::SelfLoop(v));
                }
            }
        }
        topo::order(n, |v| successors[v].iter().map(|w| w.index()))
            .map_err(|c| ModelError::Cyclic(c.into_iter().map(VertexId::new).collect()))?;
        Ok(DagInstance { successors, source, sink, threshold })
    }

    /// Convenience constructor from index lists.
    pub fn from_lists(
        successors: &[Vec<usize>],
        source: usize,
        sink: usize,
        threshold: u64,
    ) -> Result<Self, ModelError> {
        let successors = successors
            .iter()
            .map(|s| s.iter().map(|&w| VertexId::new(w)).collect())
            .collect();
        Self::new(successors, VertexId::new(source), VertexId::new(sink), BigUint::from(threshold))
    }

    pub fn len(&self) -> usize {
        self.successors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.successors[v.index()]
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn threshold(&self) -> &BigUint {
        &self.threshold
    }

    pub fn with_threshold(&self, threshold: BigUint) -> Self {
        DagInstance { threshold, ..self.clone() }
    }

    pub fn max_out_degree(&self) -> usize {
        self.successors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn topological_order(&self) -> Vec<VertexId> {
        topo::order(self.len(), |v| self.successors[v].iter().map(|w| w.index()))
            .expect("validated at construction")
            .into_iter()
            .map(VertexId::new)
            .collect()
    }

    /// Counts source-to-sink walks by depth-first enumeration.
    ///
    /// Every partial walk pushed on the search stack is charged against
    /// `budget`.
    pub fn count_paths_bruteforce(&self, budget: u64) -> Result<BigUint, PathCountError> {
        let mut count = 0u64;
        let mut explored = 0u64;
        let mut stack = vec![self.source];
        while let Some(v) = stack.pop() {
            explored += 1;
            if explored > budget {
                return Err(PathCountError::BudgetExceeded(budget));
            }
            if v == self.sink {
                count += 1;
                continue;
            }
            stack.extend(self.successors(v).iter().copied());
        }
        Ok(BigUint::from(count))
    }

    /// Counts source-to-sink walks by accumulating along a topological order.
    pub fn count_paths_dp(&self) -> BigUint {
        self.path_counts_from_source()[self.sink.index()].clone()
    }

    /// Number of walks from the source to every vertex.
    pub fn path_counts_from_source(&self) -> Vec<BigUint> {
        let mut counts = vec![BigUint::zero(); self.len()];
        counts[self.source.index()] = BigUint::one();
        for v in self.topological_order() {
            if counts[v.index()].is_zero() {
                continue;
            }
            let c = counts[v.index()].clone();
            for &w in self.successors(v) {
                counts[w.index()] += &c;
            }
        }
        counts
    }
}
