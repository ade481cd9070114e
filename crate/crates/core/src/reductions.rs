//! Instance compilers between problem families.
//!
//! * [`reduce_digicomp_to_arrival`]: a train counter in front of the
//!   acyclic graph replays the graph once per ball, so one train simulates
//!   `T` sequential balls.
//! * [`reduce_dagpaths_to_digicomp`]: `2^(n-1)` balls dropped into a
//!   layered copy of a DAG deliver exactly one ball per source-to-sink path
//!   at the last layer, and a ball counter there lets ball `k` through.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dag::DagInstance;
use crate::digicomp::BallCounts;
use crate::format::{serialize_arrival, serialize_dag, serialize_digicomp, Instance};
use crate::gadgets::{build_ball_counter, build_train_counter, Port};
use crate::model::{ArrivalInstance, DigicompInstance, SwitchGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("threshold k = 0 is vacuously satisfied and has no reduction")]
    ZeroThreshold,
    #[error("layered vertex ({vertex}, {layer}) received an odd ball count {count}")]
    OddLayerCount { vertex: usize, layer: usize, count: BigUint },
}

/// What a produced vertex stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "kebab-case")]
pub enum Role {
    /// Vertex of the source instance, same id.
    Original { vertex: usize },
    /// Counter vertex, indexed from the counter entry.
    Counter { index: usize },
    /// Copy `(vertex, layer)` of a vertex of the out-degree-split DAG.
    Layered { vertex: usize, layer: usize },
    /// Absorbing sink for balls or trains that are done.
    Fail,
    /// Fresh destination sink.
    Destination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    DigicompToArrival,
    DagpathsToDigicomp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub source_vertices: usize,
    /// Vertex count after out-degree splitting (DAG reductions only).
    pub split_vertices: Option<usize>,
    /// Balls simulated (digicomp source) or emitted (dag source).
    #[serde(with = "decimal")]
    pub balls: BigUint,
    #[serde(with = "decimal_opt", default)]
    pub threshold: Option<BigUint>,
    pub counter_vertices: usize,
    pub produced_vertices: usize,
}

/// Provenance of a produced instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCertificate {
    pub reduction: ReductionKind,
    pub source_digest: String,
    pub produced_digest: String,
    /// One entry per produced vertex, indexed by id.
    pub roles: Vec<Role>,
    pub params: ReductionParams,
}

#[derive(Debug, thiserror::Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("source digest mismatch")]
    SourceDigest,
    #[error("produced digest mismatch")]
    ProducedDigest,
    #[error("certificate does not match a fresh run of the reduction")]
    Stale,
    #[error("{0} instance cannot be the source of this reduction")]
    WrongSource(&'static str),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

impl ReductionCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Produced vertex carrying `role`, if any.
    pub fn vertex_with_role(&self, role: Role) -> Option<VertexId> {
        self.roles.iter().position(|&r| r == role).map(VertexId::new)
    }

    /// Recomputes both digests and re-runs the reduction on `source`.
    pub fn check(&self, source: &Instance, produced: &Instance) -> Result<(), CertificateError> {
        if digest(&source.to_text()) != self.source_digest {
            return Err(CertificateError::SourceDigest);
        }
        if digest(&produced.to_text()) != self.produced_digest {
            return Err(CertificateError::ProducedDigest);
        }
        let fresh = match (self.reduction, source) {
            (ReductionKind::DigicompToArrival, Instance::Digicomp(d)) => reduce_digicomp_to_arrival(d).certificate,
            (ReductionKind::DagpathsToDigicomp, Instance::Dag(d)) => reduce_dagpaths_to_digicomp(d)?.certificate,
            (_, other) => return Err(CertificateError::WrongSource(other.kind().as_str())),
        };
        if &fresh != self {
            return Err(CertificateError::Stale);
        }
        Ok(())
    }
}

/// Hex SHA-256 of an instance's canonical text.
pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

mod decimal_opt {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Debug, Clone)]
pub struct Reduced<I> {
    pub instance: I,
    pub certificate: ReductionCertificate,
}

/// `floor(log2 x) + 1` for `x >= 1`, and 0 for `x = 0`.
fn bit_length(x: &BigUint) -> usize {
    x.bits() as usize
}

/// Vertex count produced by [`reduce_digicomp_to_arrival`].
pub fn digicomp_to_arrival_size(source_vertices: usize, balls: &BigUint) -> usize {
    if balls.is_zero() {
        2
    } else {
        source_vertices + bit_length(balls) + 1
    }
}

/// Vertex count produced by [`reduce_dagpaths_to_digicomp`] from a DAG
/// with `split_vertices` vertices after splitting.
pub fn dagpaths_to_digicomp_size(split_vertices: usize, threshold: &BigUint) -> usize {
    let counter = if threshold > &BigUint::one() { bit_length(&(threshold - 1u8)) } else { 0 };
    split_vertices * split_vertices + 2 + counter
}

/// Digicomp with `T` balls to a single-train instance.
///
/// The train counter's `A` port feeds the origin, its `B` port a fresh sink
/// `F`, and every sink of the source graph is rewired to the counter entry,
/// which becomes the new origin. With `T = 0` the result is a two-vertex
/// instance whose train never leaves its starting sink.
pub fn reduce_digicomp_to_arrival(instance: &DigicompInstance) -> Reduced<ArrivalInstance> {
    let graph = instance.graph();
    let n = graph.len();
    let balls = instance.balls();

    let (produced, roles, counter_vertices) = match build_train_counter(balls) {
        Err(_) => {
            let g = SwitchGraph::with_labels(
                vec![0.into(), 1.into()],
                vec![0.into(), 1.into()],
                vec![Some("F".into()), Some("t".into())],
            )
            .expect("static graph");
            let inst = ArrivalInstance::new(g, 0.into(), 1.into()).expect("static endpoints");
            (inst, vec![Role::Fail, Role::Destination], 0)
        }
        Ok(counter) => {
            let entry = VertexId::new(n);
            let fail = VertexId::new(n + counter.len());
            let mut s0 = Vec::with_capacity(n + counter.len() + 1);
            let mut s1 = Vec::with_capacity(n + counter.len() + 1);
            let mut labels = Vec::with_capacity(n + counter.len() + 1);
            let mut roles = Vec::with_capacity(n + counter.len() + 1);
            for v in graph.vertices() {
                if graph.is_sink(v) {
                    s0.push(entry);
                    s1.push(entry);
                } else {
                    s0.push(graph.s0(v));
                    s1.push(graph.s1(v));
                }
                labels.push(graph.label(v).map(str::to_owned));
                roles.push(Role::Original { vertex: v.index() });
            }
            let wired = counter.resolve(n, |p| match p {
                Port::A => instance.origin(),
                _ => fail,
            });
            for (i, (a, b)) in wired.into_iter().enumerate() {
                s0.push(a);
                s1.push(b);
                labels.push(Some(format!("C{i}")));
                roles.push(Role::Counter { index: i });
            }
            s0.push(fail);
            s1.push(fail);
            labels.push(Some("F".into()));
            roles.push(Role::Fail);
            let g = SwitchGraph::with_labels(s0, s1, labels).expect("targets in range");
            let inst = ArrivalInstance::new(g, entry, instance.destination()).expect("endpoints in range");
            (inst, roles, counter.len())
        }
    };

    let certificate = ReductionCertificate {
        reduction: ReductionKind::DigicompToArrival,
        source_digest: digest(&serialize_digicomp(instance)),
        produced_digest: digest(&serialize_arrival(&produced)),
        params: ReductionParams {
            source_vertices: n,
            split_vertices: None,
            balls: balls.clone(),
            threshold: None,
            counter_vertices,
            produced_vertices: produced.graph.len(),
        },
        roles,
    };
    Reduced { instance: produced, certificate }
}

/// Replaces every vertex of out-degree `d > 2` by a balanced binary tree of
/// `d - 1` routing vertices rooted at the original vertex. New vertices are
/// appended after the existing ids. Path counts are unchanged.
pub fn split_outdegree(dag: &DagInstance) -> DagInstance {
    if dag.max_out_degree() <= 2 {
        return dag.clone();
    }
    let n = dag.len();
    let mut successors: Vec<Vec<VertexId>> = (0..n).map(|v| dag.successors(VertexId::new(v)).to_vec()).collect();

    fn route(leaves: &[VertexId], successors: &mut Vec<Vec<VertexId>>) -> Vec<VertexId> {
        if leaves.len() <= 2 {
            return leaves.to_vec();
        }
        let (left, right) = leaves.split_at(leaves.len().div_ceil(2));
        [left, right]
            .into_iter()
            .map(|half| {
                if half.len() == 1 {
                    half[0]
                } else {
                    let id = successors.len();
                    successors.push(Vec::new());
                    successors[id] = route(half, successors);
                    VertexId::new(id)
                }
            })
            .collect()
    }

    for v in 0..n {
        if successors[v].len() > 2 {
            let leaves = std::mem::take(&mut successors[v]);
            successors[v] = route(&leaves, &mut successors);
        }
    }
    DagInstance::new(successors, dag.source(), dag.sink(), dag.threshold().clone())
        .expect("splitting preserves acyclicity")
}

/// Id of `(vertex, layer)` in the output of [`layer_dag`] for an input with
/// `n` vertices.
pub fn layered_id(n: usize, vertex: usize, layer: usize) -> VertexId {
    VertexId::new(layer * n + vertex)
}

/// `n` layered copies of the DAG: `(u, i) -> (v, i + 1)` for every edge
/// `u -> v` with `u != t`, plus `(t, i) -> (t, i + 1)`. Source `(s, 0)`,
/// sink `(t, n - 1)`; the path count between them equals the input's.
pub fn layer_dag(dag: &DagInstance) -> DagInstance {
    let n = dag.len();
    let t = dag.sink();
    let mut successors = vec![Vec::new(); n * n];
    for layer in 0..n.saturating_sub(1) {
        for u in 0..n {
            let targets: Vec<VertexId> = if VertexId::new(u) == t {
                vec![layered_id(n, u, layer + 1)]
            } else {
                dag.successors(VertexId::new(u))
                    .iter()
                    .map(|w| layered_id(n, w.index(), layer + 1))
                    .collect()
            };
            successors[layered_id(n, u, layer).index()] = targets;
        }
    }
    DagInstance::new(
        successors,
        layered_id(n, dag.source().index(), 0),
        layered_id(n, t.index(), n - 1),
        dag.threshold().clone(),
    )
    .expect("layers only advance")
}

/// How the two out-edges of a layered vertex are assigned to `s0`/`s1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwitchAssignment {
    /// Lower target id on `s0`.
    #[default]
    LowerTargetFirst,
    /// Coin flip per vertex from a seeded generator.
    Shuffled { seed: u64 },
}

pub fn reduce_dagpaths_to_digicomp(dag: &DagInstance) -> Result<Reduced<DigicompInstance>, ReductionError> {
    reduce_dagpaths_to_digicomp_with(dag, SwitchAssignment::LowerTargetFirst)
}

/// DAG path-count threshold to Digicomp.
///
/// Layout of the produced graph: the `n * n` layered vertices, then `F`,
/// then `D`, then the ball counter for `k - 1` when `k >= 2`.
pub fn reduce_dagpaths_to_digicomp_with(
    dag: &DagInstance,
    assignment: SwitchAssignment,
) -> Result<Reduced<DigicompInstance>, ReductionError> {
    let k = dag.threshold();
    if k.is_zero() {
        return Err(ReductionError::ZeroThreshold);
    }
    let split = split_outdegree(dag);
    let n = split.len();
    let layered = layer_dag(&split);
    let last = layered.sink();

    let cells = n * n;
    let fail = VertexId::new(cells);
    let dest = VertexId::new(cells + 1);
    let counter = if k.is_one() { None } else { Some(build_ball_counter(&(k - 1u8)).expect("k - 1 >= 1")) };
    let exit = if counter.is_some() { VertexId::new(cells + 2) } else { dest };

    let mut rng = match assignment {
        SwitchAssignment::LowerTargetFirst => None,
        SwitchAssignment::Shuffled { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
    };

    let total = cells + 2 + counter.as_ref().map_or(0, |c| c.len());
    let mut s0 = Vec::with_capacity(total);
    let mut s1 = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut roles = Vec::with_capacity(total);
    for id in 0..cells {
        let u = VertexId::new(id);
        let (a, b) = if u == last {
            (exit, exit)
        } else {
            match *layered.successors(u) {
                [] => (fail, fail),
                [w] => (w, fail),
                [w, x] => {
                    let (lo, hi) = if w <= x { (w, x) } else { (x, w) };
                    let swap = rng.as_mut().is_some_and(|r| r.gen_bool(0.5));
                    if swap {
                        (hi, lo)
                    } else {
                        (lo, hi)
                    }
                }
                _ => unreachable!("out-degree is at most 2 after splitting"),
            }
        };
        s0.push(a);
        s1.push(b);
        let (vertex, layer) = (id % n, id / n);
        labels.push(Some(format!("({vertex},{layer})")));
        roles.push(Role::Layered { vertex, layer });
    }
    for (v, name, role) in [(fail, "F", Role::Fail), (dest, "D", Role::Destination)] {
        s0.push(v);
        s1.push(v);
        labels.push(Some(name.into()));
        roles.push(role);
    }
    if let Some(counter) = &counter {
        let wired = counter.resolve(cells + 2, |p| if p == Port::D { dest } else { fail });
        for (i, (a, b)) in wired.into_iter().enumerate() {
            s0.push(a);
            s1.push(b);
            labels.push(Some(format!("X{i}")));
            roles.push(Role::Counter { index: i });
        }
    }

    let balls = BigUint::one() << (n - 1);
    let graph = SwitchGraph::with_labels(s0, s1, labels).expect("targets in range");
    let produced = DigicompInstance::new(graph, layered.source(), dest, balls.clone())
        .expect("layered graph with sink exits is acyclic");

    let certificate = ReductionCertificate {
        reduction: ReductionKind::DagpathsToDigicomp,
        source_digest: digest(&serialize_dag(dag)),
        produced_digest: digest(&serialize_digicomp(&produced)),
        params: ReductionParams {
            source_vertices: dag.len(),
            split_vertices: Some(n),
            balls,
            threshold: Some(k.clone()),
            counter_vertices: counter.as_ref().map_or(0, |c| c.len()),
            produced_vertices: produced.graph().len(),
        },
        roles,
    };
    Ok(Reduced { instance: produced, certificate })
}

/// Checks that every layered vertex below the last layer received an even
/// number of balls, so every split there was an exact halving.
pub fn check_even_layers(certificate: &ReductionCertificate, counts: &BallCounts) -> Result<(), ReductionError> {
    let last_layer = certificate.params.split_vertices.unwrap_or(1).saturating_sub(1);
    for (id, role) in certificate.roles.iter().enumerate() {
        if let Role::Layered { vertex, layer } = *role {
            if layer < last_layer && counts.arrivals[id].is_odd() {
                return Err(ReductionError::OddLayerCount { vertex, layer, count: counts.arrivals[id].clone() });
            }
        }
    }
    Ok(())
}

/// Produced vertex `(t, n - 1)` of a DAG reduction: the one that feeds the
/// ball counter.
pub fn counter_feed(certificate: &ReductionCertificate, dag: &DagInstance) -> VertexId {
    let n = certificate.params.split_vertices.expect("dag reduction certificate");
    layered_id(n, dag.sink().index(), n - 1)
}
