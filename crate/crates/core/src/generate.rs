//! Seeded random instances for property suites and the CLI.
//!
//! Vertices are created in topological order, so every generated graph is
//! acyclic by construction.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dag::DagInstance;
use crate::model::{DigicompInstance, SwitchGraph, VertexId};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// DAG on `n` vertices where vertex `v` gets up to `max_degree` edges to
/// higher ids (repeats allowed). The source is usually at or before the sink.
pub fn random_dag(rng: &mut impl Rng, n: usize, max_degree: usize, threshold: BigUint) -> DagInstance {
    assert!(n >= 1);
    let successors: Vec<Vec<VertexId>> = (0..n)
        .map(|v| {
            if v + 1 == n {
                return Vec::new();
            }
            let degree = rng.gen_range(0..=max_degree);
            (0..degree).map(|_| VertexId::new(rng.gen_range(v + 1..n))).collect()
        })
        .collect();
    let source = rng.gen_range(0..n);
    let sink = if rng.gen_bool(0.9) { rng.gen_range(source..n) } else { rng.gen_range(0..n) };
    DagInstance::new(successors, VertexId::new(source), VertexId::new(sink), threshold)
        .expect("edges only go to higher ids")
}

/// Acyclic switch graph on `n` vertices. The last vertex is always a sink;
/// every other vertex is a sink, has one self-loop and one forward exit, or
/// has two forward exits.
pub fn random_acyclic_switchgraph(rng: &mut impl Rng, n: usize) -> SwitchGraph {
    assert!(n >= 1);
    let pairs: Vec<(usize, usize)> = (0..n)
        .map(|v| {
            if v + 1 == n {
                return (v, v);
            }
            let roll: f64 = rng.gen();
            let forward = |rng: &mut dyn rand::RngCore| rng.gen_range(v + 1..n);
            if roll < 0.15 {
                (v, v)
            } else if roll < 0.3 {
                let w = forward(rng);
                if rng.gen_bool(0.5) { (v, w) } else { (w, v) }
            } else {
                (forward(rng), forward(rng))
            }
        })
        .collect();
    SwitchGraph::from_pairs(&pairs).expect("targets in range")
}

/// Random acyclic Digicomp instance with `n` vertices and `balls` balls.
pub fn random_digicomp(rng: &mut impl Rng, n: usize, balls: BigUint) -> DigicompInstance {
    let graph = random_acyclic_switchgraph(rng, n);
    let origin = VertexId::new(rng.gen_range(0..n));
    let destination = VertexId::new(rng.gen_range(0..n));
    DigicompInstance::new(graph, origin, destination, balls).expect("generated graph is acyclic")
}
