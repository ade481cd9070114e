//! Logarithmic-size counters built from the binary expansion of `T`.
//!
//! A train counter with entry `C` sends `T` consecutive visits out through
//! port `A`, the next one through port `B`, and is then back in its initial
//! state. A ball counter with entry `X0` sends balls `1..=T` to port `F`
//! and ball `T + 1` to port `D`. Both use `bits(T)` vertices.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::model::{ArrivalInstance, Configuration, DigicompInstance, SwitchGraph, SwitchStates, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CounterKind {
    Train,
    Ball,
}

/// External attachment point of a counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    /// Train counter: taken `T` times per period.
    A,
    /// Train counter: taken once per period.
    B,
    /// Ball counter: balls `1..=T`.
    F,
    /// Ball counter: ball `T + 1`.
    D,
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Port::A => "A",
            Port::B => "B",
            Port::F => "F",
            Port::D => "D",
        };
        f.write_str(s)
    }
}

/// Successor of a counter vertex: another counter vertex or a port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Node(usize),
    Port(Port),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("a counter needs a target of at least 1; wire the edge straight to the overflow port instead")]
    ZeroTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CounterGadget {
    kind: CounterKind,
    target: BigUint,
    s0: Vec<Target>,
    s1: Vec<Target>,
}

impl CounterGadget {
    pub fn kind(&self) -> CounterKind {
        self.kind
    }

    pub fn target(&self) -> &BigUint {
        &self.target
    }

    /// Number of counter vertices.
    pub fn len(&self) -> usize {
        self.s0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s0.is_empty()
    }

    /// Index of the entry vertex within the fragment.
    pub fn entry(&self) -> usize {
        0
    }

    pub fn s0(&self, node: usize) -> Target {
        self.s0[node]
    }

    pub fn s1(&self, node: usize) -> Target {
        self.s1[node]
    }

    pub(crate) fn swap_exits(&mut self, node: usize) {
        std::mem::swap(&mut self.s0[node], &mut self.s1[node]);
    }

    pub fn ports(&self) -> [Port; 2] {
        match self.kind {
            CounterKind::Train => [Port::A, Port::B],
            CounterKind::Ball => [Port::F, Port::D],
        }
    }

    /// Successor pairs for the fragment once it is placed at ids
    /// `base..base + len()` and its ports are wired by `port`.
    pub fn resolve(&self, base: usize, port: impl Fn(Port) -> VertexId) -> Vec<(VertexId, VertexId)> {
        let map = |t: Target| match t {
            Target::Node(i) => VertexId::new(base + i),
            Target::Port(p) => port(p),
        };
        self.s0.iter().zip(&self.s1).map(|(&a, &b)| (map(a), map(b))).collect()
    }

    fn node_label(&self, i: usize) -> String {
        match self.kind {
            CounterKind::Train => format!("C{i}"),
            CounterKind::Ball => format!("X{i}"),
        }
    }

    /// Fragment at ids `0..len()`, first port at `len()`, second port at
    /// `len() + 1`, with the given successor pairs for the two port vertices.
    fn harness_graph(&self, first: (usize, usize), second: (usize, usize)) -> SwitchGraph {
        let m = self.len();
        let [p, q] = self.ports();
        let port = |x: Port| VertexId::new(if x == p { m } else { m + 1 });
        let (mut s0, mut s1): (Vec<_>, Vec<_>) = self.resolve(0, port).into_iter().unzip();
        let mut labels: Vec<Option<String>> = (0..m).map(|i| Some(self.node_label(i))).collect();
        for ((a, b), name) in [(first, p), (second, q)] {
            s0.push(VertexId::new(a));
            s1.push(VertexId::new(b));
            labels.push(Some(name.to_string()));
        }
        SwitchGraph::with_labels(s0, s1, labels).expect("harness is well formed")
    }

    /// Self-contained train harness: `A` loops back to `C`, `B` is a sink
    /// and the destination.
    pub fn train_harness(&self) -> ArrivalInstance {
        assert_eq!(self.kind, CounterKind::Train);
        let m = self.len();
        let graph = self.harness_graph((0, 0), (m + 1, m + 1));
        ArrivalInstance::new(graph, VertexId::new(0), VertexId::new(m + 1)).expect("valid endpoints")
    }

    /// Self-contained ball harness: `F` and `D` are sinks, `D` is the
    /// destination and `T + 1` balls are dropped.
    pub fn ball_harness(&self) -> DigicompInstance {
        assert_eq!(self.kind, CounterKind::Ball);
        let m = self.len();
        let graph = self.harness_graph((m, m), (m + 1, m + 1));
        DigicompInstance::new(graph, VertexId::new(0), VertexId::new(m + 1), &self.target + 1u8)
            .expect("ball counter is acyclic")
    }
}

/// Train counter as a flat chain `C0..Cm` over the bits `b_m..b_0` of `T`:
/// `s1` climbs the chain and leaves through `B` at the top; `s0` of `C0`
/// goes to `A`, and `s0` of `Ci` goes to `A` when `b_(m-i)` is set and back
/// to `C0` otherwise.
pub fn build_train_counter(target: &BigUint) -> Result<CounterGadget, GadgetError> {
    if target.is_zero() {
        return Err(GadgetError::ZeroTarget);
    }
    let m = (target.bits() - 1) as usize;
    let mut s0 = Vec::with_capacity(m + 1);
    let mut s1 = Vec::with_capacity(m + 1);
    for i in 0..=m {
        s0.push(if i == 0 || target.bit((m - i) as u64) {
            Target::Port(Port::A)
        } else {
            Target::Node(0)
        });
        s1.push(if i < m { Target::Node(i + 1) } else { Target::Port(Port::B) });
    }
    Ok(CounterGadget { kind: CounterKind::Train, target: target.clone(), s0, s1 })
}

/// Ball counter as a chain `X0..Xm`. `Xm` sends its first ball to `F` and
/// its second to `D`. For `j < m`, `Xj` passes odd-numbered arrivals up the
/// chain when bit `j` of `T` is clear and even-numbered ones when it is
/// set; everything else goes to `F`.
pub fn build_ball_counter(target: &BigUint) -> Result<CounterGadget, GadgetError> {
    if target.is_zero() {
        return Err(GadgetError::ZeroTarget);
    }
    let m = (target.bits() - 1) as usize;
    let mut s0 = Vec::with_capacity(m + 1);
    let mut s1 = Vec::with_capacity(m + 1);
    for j in 0..m {
        let up = Target::Node(j + 1);
        let out = Target::Port(Port::F);
        let (a, b) = if target.bit(j as u64) { (out, up) } else { (up, out) };
        s0.push(a);
        s1.push(b);
    }
    s0.push(Target::Port(Port::F));
    s1.push(Target::Port(Port::D));
    Ok(CounterGadget { kind: CounterKind::Ball, target: target.clone(), s0, s1 })
}

/// Exit ports taken by `entries` successive entries into the counter.
pub fn counter_exit_trace(gadget: &CounterGadget, entries: usize) -> Vec<Port> {
    let mut trace = Vec::with_capacity(entries);
    counter_exit_trace_with(gadget, entries, |port, _| trace.push(port));
    trace
}

/// Like [`counter_exit_trace`], but reports each exit together with the
/// fragment's switch bits at that moment.
///
/// Train counters run as one train whose exits both loop back to the
/// entry; ball counters drop a fresh ball at the entry for every entry.
pub fn counter_exit_trace_with(
    gadget: &CounterGadget,
    entries: usize,
    mut on_exit: impl FnMut(Port, &SwitchStates),
) {
    let m = gadget.len();
    let [p, q] = gadget.ports();
    let graph = match gadget.kind {
        CounterKind::Train => gadget.harness_graph((0, 0), (0, 0)),
        CounterKind::Ball => gadget.harness_graph((m, m), (m + 1, m + 1)),
    };
    let mut config = Configuration::initial(&graph, VertexId::new(0));
    let mut fragment = SwitchStates::zeros(m);
    for _ in 0..entries {
        config.position = VertexId::new(0);
        while config.position.index() < m {
            config.advance(&graph);
        }
        let port = if config.position.index() == m { p } else { q };
        for i in 0..m {
            fragment.set(i, config.switches.get(i));
        }
        on_exit(port, &fragment);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn train_pattern(t: usize, periods: usize) -> Vec<Port> {
        let mut v = Vec::new();
        for _ in 0..periods {
            v.extend(std::iter::repeat_n(Port::A, t));
            v.push(Port::B);
        }
        v
    }

    #[test]
    fn zero_target_is_rejected() {
        assert_eq!(build_train_counter(&big(0)), Err(GadgetError::ZeroTarget));
        assert_eq!(build_ball_counter(&big(0)), Err(GadgetError::ZeroTarget));
    }

    #[test]
    fn sixteen_is_the_four_bit_counter() {
        let g = build_train_counter(&big(16)).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.s0(0), Target::Port(Port::A));
        for i in 1..5 {
            assert_eq!(g.s0(i), Target::Node(0));
        }
        for i in 0..4 {
            assert_eq!(g.s1(i), Target::Node(i + 1));
        }
        assert_eq!(g.s1(4), Target::Port(Port::B));
        assert_eq!(counter_exit_trace(&g, 17), train_pattern(16, 1));
    }

    #[test]
    fn twenty_two() {
        let g = build_train_counter(&big(22)).unwrap();
        let s0: Vec<Target> = (0..5).map(|i| g.s0(i)).collect();
        use Target::*;
        assert_eq!(s0, vec![Port(super::Port::A), Node(0), Port(super::Port::A), Port(super::Port::A), Node(0)]);
        assert_eq!(counter_exit_trace(&g, 23), train_pattern(22, 1));
    }

    #[test]
    fn train_base_case_alternates() {
        let g = build_train_counter(&big(1)).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!((g.s0(0), g.s1(0)), (Target::Port(Port::A), Target::Port(Port::B)));
        assert_eq!(counter_exit_trace(&g, 4), vec![Port::A, Port::B, Port::A, Port::B]);
    }

    #[test]
    fn train_two_over_six_entries() {
        let g = build_train_counter(&big(2)).unwrap();
        use Port::*;
        assert_eq!(counter_exit_trace(&g, 6), vec![A, A, B, A, A, B]);
        assert!(counter_exit_trace(&g, 0).is_empty());
    }

    #[test]
    fn ball_counter_small_cases() {
        use Port::*;
        let g = build_ball_counter(&big(1)).unwrap();
        assert_eq!((g.s0(0), g.s1(0)), (Target::Port(F), Target::Port(D)));
        assert_eq!(counter_exit_trace(&g, 2), vec![F, D]);

        let g = build_ball_counter(&big(2)).unwrap();
        assert_eq!((g.s0(0), g.s1(0)), (Target::Node(1), Target::Port(F)));
        assert_eq!((g.s0(1), g.s1(1)), (Target::Port(F), Target::Port(D)));
        assert_eq!(counter_exit_trace(&g, 3), vec![F, F, D]);

        let g = build_ball_counter(&big(3)).unwrap();
        assert_eq!(counter_exit_trace(&g, 5), vec![F, F, F, D, F]);

        let g = build_ball_counter(&big(4)).unwrap();
        let trace = counter_exit_trace(&g, 5);
        assert_eq!(trace.iter().position(|&p| p == D), Some(4));
    }

    #[test]
    fn harnesses() {
        let g = build_train_counter(&big(16)).unwrap();
        let h = g.train_harness();
        assert_eq!(h.graph.len(), 7);
        assert_eq!(h.graph.label(VertexId::new(5)), Some("A"));
        assert_eq!(h.graph.label(VertexId::new(6)), Some("B"));

        let g = build_ball_counter(&big(5)).unwrap();
        let h = g.ball_harness();
        assert_eq!(h.balls(), &big(6));
        let out = crate::digicomp::run_digicomp_naive(&h, None).unwrap();
        assert!(out.reached);
        assert_eq!(out.counts.arrivals_at(h.destination()), &big(1));
        let out = crate::digicomp::run_digicomp_naive(&h.with_balls(big(5)), None).unwrap();
        assert!(!out.reached);
    }

    #[test]
    fn size_is_bit_length() {
        for t in [1u64, 2, 3, 4, 7, 8, 1000, u64::MAX] {
            let expected = 64 - t.leading_zeros() as usize;
            assert_eq!(build_train_counter(&big(t)).unwrap().len(), expected);
            assert_eq!(build_ball_counter(&big(t)).unwrap().len(), expected);
        }
    }
}
