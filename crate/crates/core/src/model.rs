//! Switch graphs, problem instances and train configurations.

use std::fmt;

use num_bigint::BigUint;

use crate::topo;

/// Dense vertex index in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct VertexId(u32);

impl VertexId {
    pub fn new(index: usize) -> Self {
        VertexId(u32::try_from(index).expect("vertex index exceeds u32 range"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    fn from(index: usize) -> Self {
        VertexId::new(index)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("vertex {vertex} refers to {target}, which is not in [0, {n})")]
    DanglingReference { vertex: usize, target: usize, n: usize },
    #[error("{what} vertex {id} is not in [0, {n})")]
    InvalidEndpoint { what: &'static str, id: usize, n: usize },
    #[error("successor maps have lengths {s0} and {s1}; both must be {n}")]
    LengthMismatch { n: usize, s0: usize, s1: usize },
    #[error("invalid label {label:?} on vertex {vertex}")]
    InvalidLabel { vertex: usize, label: String },
    #[error("graph has a cycle through vertices {0:?}")]
    Cyclic(Vec<VertexId>),
    #[error("dag vertex {0} has a self-loop")]
    SelfLoop(usize),
}

/// A vertex set with two total successor maps.
///
/// `s0` is drawn solid and `s1` dashed. A vertex whose successors are both
/// itself is a sink.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SwitchGraph {
    s0: Vec<VertexId>,
    s1: Vec<VertexId>,
    labels: Vec<Option<String>>,
}

impl SwitchGraph {
    pub fn new(s0: Vec<VertexId>, s1: Vec<VertexId>) -> Result<Self, ModelError> {
        let n = s0.len();
        let labels = vec![None; n];
        Self::with_labels(s0, s1, labels)
    }

    pub fn with_labels(
        s0: Vec<VertexId>,
        s1: Vec<VertexId>,
        labels: Vec<Option<String>>,
    ) -> Result<Self, ModelError> {
        let n = s0.len();
        if s1.len() != n || labels.len() != n {
            return Err(ModelError::LengthMismatch { n, s0: s0.len(), s1: s1.len() });
        }
        for (v, (&a, &b)) in s0.iter().zip(&s1).enumerate() {
            for target in [a, b] {
                if target.index() >= n {
                    return Err(ModelError::DanglingReference { vertex: v, target: target.index(), n });
                }
            }
        }
        for (v, label) in labels.iter().enumerate() {
            if let Some(label) = label {
                if !is_valid_label(label) {
                    return Err(ModelError::InvalidLabel { vertex: v, label: label.clone() });
                }
            }
        }
        Ok(SwitchGraph { s0, s1, labels })
    }

    /// Builds a graph from `(s0, s1)` index pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self, ModelError> {
        let s0 = pairs.iter().map(|&(a, _)| VertexId::new(a)).collect();
        let s1 = pairs.iter().map(|&(_, b)| VertexId::new(b)).collect();
        Self::new(s0, s1)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.s0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.s0.is_empty()
    }

    #[inline]
    pub fn s0(&self, v: VertexId) -> VertexId {
        self.s0[v.index()]
    }

    #[inline]
    pub fn s1(&self, v: VertexId) -> VertexId {
        self.s1[v.index()]
    }

    /// Successor taken by a visitor when the switch at `v` reads `bit`.
    #[inline]
    pub fn successor(&self, v: VertexId, bit: bool) -> VertexId {
        if bit {
            self.s1[v.index()]
        } else {
            self.s0[v.index()]
        }
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels[v.index()].as_deref()
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.s0(v) == v && self.s1(v) == v
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len()).map(VertexId::new)
    }

    /// Checks acyclicity in the self-loop-tolerant sense.
    pub fn check_acyclic(&self) -> Result<(), ModelError> {
        self.topological_order().map(|_| ())
    }

    /// Topological order of the graph with self-loops stripped.
    pub fn topological_order(&self) -> Result<Vec<VertexId>, ModelError> {
        topo::order(self.len(), |v| [self.s0[v].index(), self.s1[v].index()])
            .map(|order| order.into_iter().map(VertexId::new).collect())
            .map_err(|cycle| ModelError::Cyclic(cycle.into_iter().map(VertexId::new).collect()))
    }
}

pub(crate) fn is_valid_label(label: &str) -> bool {
    !label.is_empty()
        && label.trim() == label
        && !label.contains(['#', '\n', '\r'])
}

/// A single-train reachability question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalInstance {
    pub graph: SwitchGraph,
    pub origin: VertexId,
    pub destination: VertexId,
}

impl ArrivalInstance {
    pub fn new(graph: SwitchGraph, origin: VertexId, destination: VertexId) -> Result<Self, ModelError> {
        check_endpoint("origin", origin, graph.len())?;
        check_endpoint("destination", destination, graph.len())?;
        Ok(ArrivalInstance { graph, origin, destination })
    }
}

/// `balls` balls released one after another from `origin` on an acyclic graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigicompInstance {
    graph: SwitchGraph,
    origin: VertexId,
    destination: VertexId,
    balls: BigUint,
}

impl DigicompInstance {
    pub fn new(
        graph: SwitchGraph,
        origin: VertexId,
        destination: VertexId,
        balls: BigUint,
    ) -> Result<Self, ModelError> {
        check_endpoint("origin", origin, graph.len())?;
        check_endpoint("destination", destination, graph.len())?;
        graph.check_acyclic()?;
        Ok(DigicompInstance { graph, origin, destination, balls })
    }

    pub fn graph(&self) -> &SwitchGraph {
        &self.graph
    }

    pub fn origin(&self) -> VertexId {
        self.origin
    }

    pub fn destination(&self) -> VertexId {
        self.destination
    }

    pub fn balls(&self) -> &BigUint {
        &self.balls
    }

    pub fn with_balls(&self, balls: BigUint) -> Self {
        DigicompInstance { balls, ..self.clone() }
    }
}

pub(crate) fn check_endpoint(what: &'static str, id: VertexId, n: usize) -> Result<(), ModelError> {
    if id.index() >= n {
        return Err(ModelError::InvalidEndpoint { what, id: id.index(), n });
    }
    Ok(())
}

/// One switch bit per vertex; `false` means the next visitor leaves along `s0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SwitchStates {
    words: Vec<u64>,
    len: usize,
}

impl SwitchStates {
    pub fn zeros(len: usize) -> Self {
        SwitchStates { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut states = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                states.flip(i);
            }
        }
        states
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Flips bit `i` and returns its previous value.
    #[inline]
    pub fn flip(&mut self, i: usize) -> bool {
        assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        let old = self.words[i / 64] & mask != 0;
        self.words[i / 64] ^= mask;
        old
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn is_all_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

/// Train position together with every switch bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub position: VertexId,
    pub switches: SwitchStates,
}

impl Configuration {
    /// Train at `origin`, all switches in state 0.
    pub fn initial(graph: &SwitchGraph, origin: VertexId) -> Self {
        Configuration { position: origin, switches: SwitchStates::zeros(graph.len()) }
    }
}
