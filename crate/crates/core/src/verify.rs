//! Seeded property suites over the gadgets, engines and reductions.
//!
//! Each suite runs a list of named properties and records, per property,
//! how many cases were checked, how many failed, and the first failing
//! instance in the text format. With `inject_fault` set, every produced
//! artifact gets one edge redirected before it is checked, which the suites
//! must detect.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrival::{run_arrival, Detector, Verdict};
use crate::dag::{DagInstance, BRUTEFORCE_BUDGET};
use crate::digicomp::{parity_diagnostic, run_digicomp_fast, run_digicomp_naive};
use crate::format::{serialize_arrival, serialize_dag, serialize_digicomp};
use crate::gadgets::{build_ball_counter, build_train_counter, counter_exit_trace_with, CounterGadget, Port};
use crate::generate::{random_dag, random_digicomp};
use crate::model::{ArrivalInstance, DigicompInstance, SwitchGraph, VertexId};
use crate::reductions::{
    check_even_layers, counter_feed, dagpaths_to_digicomp_size, digicomp_to_arrival_size, layer_dag,
    reduce_dagpaths_to_digicomp, reduce_dagpaths_to_digicomp_with, reduce_digicomp_to_arrival, split_outdegree,
    Reduced, Role, SwitchAssignment,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Counters,
    Prop1,
    Prop2,
    Compose,
    Parity,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Counters, Suite::Prop1, Suite::Prop2, Suite::Compose, Suite::Parity];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Counters => "counters",
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Compose => "compose",
            Suite::Parity => "parity",
        }
    }

    /// Default case count. For `counters` this is the exhaustive bound on `T`.
    pub fn default_cases(self) -> usize {
        match self {
            Suite::Counters => 4096,
            Suite::Prop1 | Suite::Prop2 | Suite::Parity => 200,
            Suite::Compose => 50,
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub cases: Option<usize>,
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 42, cases: None, inject_fault: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// First failing case, as instance text plus a note.
    pub counterexample: Option<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyReport::passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.properties {
            let status = if p.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {}/{} cases={} failures={}", self.suite, p.name, p.cases, p.failures)?;
            if let Some(cx) = &p.counterexample {
                for line in cx.lines() {
                    writeln!(f, "  | {line}")?;
                }
            }
        }
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{status} {}", self.suite)
    }
}

/// Accumulates cases for one property.
struct Property {
    report: PropertyReport,
}

impl Property {
    fn new(name: &'static str) -> Self {
        Property { report: PropertyReport { name, cases: 0, failures: 0, counterexample: None } }
    }

    fn check(&mut self, ok: bool, counterexample: impl FnOnce() -> String) {
        self.report.cases += 1;
        if !ok {
            self.report.failures += 1;
            if self.report.counterexample.is_none() {
                self.report.counterexample = Some(counterexample());
            }
        }
    }

    fn finish(self) -> PropertyReport {
        self.report
    }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(suite.stream());
    let cases = config.cases.unwrap_or(suite.default_cases());
    let properties = match suite {
        Suite::Counters => counters(&mut rng, cases, config.inject_fault),
        Suite::Prop1 => prop1(&mut rng, cases, config.inject_fault),
        Suite::Prop2 => prop2(&mut rng, cases, config.inject_fault),
        Suite::Compose => compose(&mut rng, cases, config.inject_fault),
        Suite::Parity => parity(&mut rng, cases, config.inject_fault),
    };
    SuiteReport { suite, properties }
}

fn train_counter(t: &BigUint, fault: bool) -> CounterGadget {
    let mut g = build_train_counter(t).expect("t >= 1");
    if fault {
        let top = g.len() - 1;
        g.swap_exits(top);
    }
    g
}

fn ball_counter(t: &BigUint, fault: bool) -> CounterGadget {
    let mut g = build_ball_counter(t).expect("t >= 1");
    if fault {
        let top = g.len() - 1;
        g.swap_exits(top);
    }
    g
}

/// Runs `2 (T + 1)` entries through a train counter and checks the exit
/// sequence is `(A^T B)^2` with all counter switches at 0 after each `B`.
pub fn train_counter_law_holds(gadget: &CounterGadget, t: u64) -> bool {
    let period = t as usize + 1;
    let mut index = 0usize;
    let mut ok = true;
    counter_exit_trace_with(gadget, 2 * period, |port, switches| {
        index += 1;
        let expected = if index.is_multiple_of(period) { Port::B } else { Port::A };
        if port != expected || (port == Port::B && !switches.is_all_zero()) {
            ok = false;
        }
    });
    ok
}

/// Index (1-based) of the first entry that exits through `D`, looking at
/// the first `limit` entries.
pub fn first_d_exit(gadget: &CounterGadget, limit: usize) -> Option<usize> {
    let mut first = None;
    let mut index = 0usize;
    counter_exit_trace_with(gadget, limit, |port, _| {
        index += 1;
        if port == Port::D && first.is_none() {
            first = Some(index);
        }
    });
    first
}

fn counters(rng: &mut ChaCha8Rng, bound: usize, fault: bool) -> Vec<PropertyReport> {
    let bound = bound.max(1) as u64;
    let mut size = Property::new("size-law");
    let mut train = Property::new("train-law");
    let mut ball = Property::new("ball-threshold");
    let mut determinism = Property::new("determinism");

    let mut targets: Vec<u64> = (1..=bound).collect();
    let random_large = (bound / 40).clamp(1, 100);
    targets.extend((0..random_large).map(|_| rng.gen_range(1..=1u64 << 20)));

    for t in 1..=bound {
        let big = BigUint::from(t);
        let expected = 64 - t.leading_zeros() as usize;
        let (tc, bc) = (train_counter(&big, fault), ball_counter(&big, fault));
        size.check(tc.len() == expected && bc.len() == expected, || format!("T = {t}"));
        determinism.check(tc == train_counter(&big, fault) && bc == ball_counter(&big, fault), || format!("T = {t}"));
        ball.check(first_d_exit(&bc, t as usize + 1) == Some(t as usize + 1), || {
            format!("ball counter T = {t}\n{}", serialize_digicomp(&bc.ball_harness()))
        });
    }
    for _ in 0..200 {
        let t: u64 = rng.gen_range(1..=u64::MAX);
        let expected = 64 - t.leading_zeros() as usize;
        size.check(
            build_train_counter(&t.into()).unwrap().len() == expected
                && build_ball_counter(&t.into()).unwrap().len() == expected,
            || format!("T = {t}"),
        );
    }
    for t in targets {
        let g = train_counter(&BigUint::from(t), fault);
        train.check(train_counter_law_holds(&g, t), || {
            format!("train counter T = {t}\n{}", serialize_arrival(&g.train_harness()))
        });
    }
    vec![size.finish(), train.finish(), ball.finish(), determinism.finish()]
}

fn case_rng(rng: &mut ChaCha8Rng) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rng.next_u64())
}

/// Redirects `s0` of vertex `v` to `target`.
fn redirect(graph: &SwitchGraph, v: VertexId, target: VertexId) -> SwitchGraph {
    let mut s0: Vec<VertexId> = graph.vertices().map(|u| graph.s0(u)).collect();
    let s1: Vec<VertexId> = graph.vertices().map(|u| graph.s1(u)).collect();
    s0[v.index()] = target;
    let labels = graph.vertices().map(|u| graph.label(u).map(str::to_owned)).collect();
    SwitchGraph::with_labels(s0, s1, labels).expect("redirect stays in range")
}

fn reduce_prop1(source: &DigicompInstance, fault: bool) -> Reduced<ArrivalInstance> {
    let mut reduced = reduce_digicomp_to_arrival(source);
    if fault {
        if let Some(fail) = reduced.certificate.vertex_with_role(Role::Fail) {
            let inst = &reduced.instance;
            let graph = redirect(&inst.graph, inst.origin, fail);
            reduced.instance = ArrivalInstance::new(graph, inst.origin, inst.destination).expect("same endpoints");
        }
    }
    reduced
}

fn reduce_prop2(dag: &DagInstance, assignment: SwitchAssignment, fault: bool) -> Reduced<DigicompInstance> {
    let mut reduced = reduce_dagpaths_to_digicomp_with(dag, assignment).expect("k >= 1");
    if fault {
        let inst = &reduced.instance;
        let graph = redirect(inst.graph(), inst.origin(), inst.destination());
        reduced.instance = DigicompInstance::new(graph, inst.origin(), inst.destination(), inst.balls().clone())
            .expect("redirecting to a sink keeps the graph acyclic");
    }
    reduced
}

fn prop1(rng: &mut ChaCha8Rng, cases: usize, fault: bool) -> Vec<PropertyReport> {
    let mut agreement = Property::new("engine-agreement");
    let mut end_to_end = Property::new("prop1-verdict");
    let mut detectors = Property::new("detector-agreement");
    let mut size = Property::new("prop1-size");

    for _ in 0..cases {
        let mut r = case_rng(rng);
        let n = r.gen_range(1..=12);
        let balls = r.gen_range(0..=64u64);
        let inst = random_digicomp(&mut r, n, balls.into());
        let naive = run_digicomp_naive(&inst, None);
        let fast = run_digicomp_fast(&inst);
        agreement.check(matches!((&naive, &fast), (Ok(a), Ok(b)) if a == b), || serialize_digicomp(&inst));
    }

    for _ in 0..cases {
        let mut r = case_rng(rng);
        let n = r.gen_range(1..=10);
        let balls = r.gen_range(0..=32u64);
        let source = random_digicomp(&mut r, n, balls.into());
        let expected = run_digicomp_fast(&source).expect("acyclic").reached;
        let reduced = reduce_prop1(&source, fault);
        let dump = || format!("{}--- produced\n{}", serialize_digicomp(&source), serialize_arrival(&reduced.instance));

        let hash = run_arrival(&reduced.instance, None, Detector::HashSet);
        let floyd = run_arrival(&reduced.instance, None, Detector::ConstantMemory);
        let verdict = hash.as_ref().ok().map(|o| o.verdict);
        end_to_end.check(verdict == Some(if expected { Verdict::Arrives } else { Verdict::Diverges }), dump);
        detectors.check(
            hash.as_ref().ok().map(|o| o.verdict) == floyd.as_ref().ok().map(|o| o.verdict) && hash.is_ok(),
            dump,
        );
        size.check(reduced.instance.graph.len() == digicomp_to_arrival_size(n, source.balls()), dump);
    }
    vec![agreement.finish(), end_to_end.finish(), detectors.finish(), size.finish()]
}

struct DagCase {
    dag: DagInstance,
    paths: BigUint,
}

fn random_dag_case(r: &mut ChaCha8Rng, max_n: usize, max_degree: usize, max_k: u64) -> DagCase {
    let n = r.gen_range(1..=max_n);
    let k = r.gen_range(1..=max_k);
    let dag = random_dag(r, n, max_degree, k.into());
    let paths = dag.count_paths_bruteforce(BRUTEFORCE_BUDGET).expect("small dag");
    DagCase { dag, paths }
}

fn prop2(rng: &mut ChaCha8Rng, cases: usize, fault: bool) -> Vec<PropertyReport> {
    let mut oracles = Property::new("dp-matches-bruteforce");
    let mut split = Property::new("split-preserves-paths");
    let mut layer = Property::new("layering-preserves-paths");
    let mut end_to_end = Property::new("prop2-verdict");
    let mut feed = Property::new("counter-entry-count");
    let mut even = Property::new("even-layer-counts");
    let mut alternate = Property::new("alternate-assignment");
    let mut size = Property::new("prop2-size");

    for _ in 0..cases {
        let mut r = case_rng(rng);
        let DagCase { dag, paths } = random_dag_case(&mut r, 8, 5, 20);
        let alt_seed = r.next_u64();
        let dump_dag = || serialize_dag(&dag);

        oracles.check(dag.count_paths_dp() == paths, dump_dag);
        let s = split_outdegree(&dag);
        split.check(
            s.max_out_degree() <= 2 && s.count_paths_bruteforce(BRUTEFORCE_BUDGET).ok() == Some(paths.clone()),
            dump_dag,
        );
        let l = layer_dag(&s);
        layer.check(
            l.len() == s.len() * s.len()
                && l.max_out_degree() <= 2
                && l.count_paths_bruteforce(BRUTEFORCE_BUDGET).ok() == Some(paths.clone()),
            dump_dag,
        );

        let expected = &paths >= dag.threshold();
        let reduced = reduce_prop2(&dag, SwitchAssignment::LowerTargetFirst, fault);
        let dump = || format!("{}--- produced\n{}", serialize_dag(&dag), serialize_digicomp(&reduced.instance));
        let out = run_digicomp_fast(&reduced.instance).expect("acyclic");
        end_to_end.check(out.reached == expected, dump);
        let entry = counter_feed(&reduced.certificate, &dag);
        feed.check(out.counts.arrivals_at(entry) == &paths, dump);
        even.check(check_even_layers(&reduced.certificate, &out.counts).is_ok(), dump);
        size.check(
            reduced.instance.graph().len() == dagpaths_to_digicomp_size(s.len(), dag.threshold()),
            dump,
        );

        let shuffled = reduce_prop2(&dag, SwitchAssignment::Shuffled { seed: alt_seed }, fault);
        let out = run_digicomp_fast(&shuffled.instance).expect("acyclic");
        alternate.check(out.reached == expected && out.counts.arrivals_at(entry) == &paths, dump);
    }
    vec![
        oracles.finish(),
        split.finish(),
        layer.finish(),
        end_to_end.finish(),
        feed.finish(),
        even.finish(),
        alternate.finish(),
        size.finish(),
    ]
}

fn compose(rng: &mut ChaCha8Rng, cases: usize, fault: bool) -> Vec<PropertyReport> {
    let mut verdict = Property::new("compose-verdict");
    for _ in 0..cases {
        let mut r = case_rng(rng);
        let DagCase { dag, paths } = random_dag_case(&mut r, 6, 3, 8);
        let expected = if &paths >= dag.threshold() { Verdict::Arrives } else { Verdict::Diverges };
        let digicomp = reduce_dagpaths_to_digicomp(&dag).expect("k >= 1").instance;
        let arrival = reduce_prop1(&digicomp, fault).instance;
        let out = run_arrival(&arrival, None, Detector::HashSet);
        verdict.check(out.as_ref().ok().map(|o| o.verdict) == Some(expected), || {
            let mut s = serialize_dag(&dag);
            let _ = write!(s, "--- produced\n{}", serialize_arrival(&arrival));
            s
        });
    }
    vec![verdict.finish()]
}

fn parity(rng: &mut ChaCha8Rng, cases: usize, fault: bool) -> Vec<PropertyReport> {
    let mut bit = Property::new("parity-bit");
    for _ in 0..cases {
        let mut r = case_rng(rng);
        let DagCase { dag, paths } = random_dag_case(&mut r, 8, 5, 20);
        let reduced = reduce_prop2(&dag, SwitchAssignment::LowerTargetFirst, fault);
        let out = run_digicomp_fast(&reduced.instance).expect("acyclic");
        let entry = counter_feed(&reduced.certificate, &dag);
        let odd = !(&paths % 2u8).is_zero();
        bit.check(parity_diagnostic(&out.counts, entry) == odd, || {
            format!("{}--- produced\n{}", serialize_dag(&dag), serialize_digicomp(&reduced.instance))
        });
    }
    vec![bit.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite, cases: usize, fault: bool) -> SuiteReport {
        run_suite(suite, &VerifyConfig { seed: 42, cases: Some(cases), inject_fault: fault })
    }

    #[test]
    fn suites_pass_on_small_budgets() {
        for (suite, cases) in [(Suite::Counters, 64), (Suite::Prop1, 20), (Suite::Prop2, 20), (Suite::Compose, 5), (Suite::Parity, 20)] {
            let report = small(suite, cases, false);
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn injected_faults_are_caught() {
        for (suite, cases) in [(Suite::Counters, 16), (Suite::Prop1, 40), (Suite::Prop2, 40), (Suite::Compose, 20), (Suite::Parity, 40)] {
            let report = small(suite, cases, true);
            assert!(!report.passed(), "{suite} did not catch the fault");
            let failing = report.properties.iter().find(|p| !p.passed()).unwrap();
            assert!(failing.counterexample.as_ref().unwrap().contains("switchgraph v1"));
        }
    }

    #[test]
    fn reports_are_deterministic() {
        assert_eq!(small(Suite::Prop2, 10, false), small(Suite::Prop2, 10, false));
    }
}
