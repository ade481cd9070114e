//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Every expected value here comes from an oracle written in this file:
//! a direct gadget simulator, a one-ball-at-a-time Digicomp simulator, a
//! recursive path counter and a pull-based halving recurrence.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use switchgraph::arrival::{run_arrival, Detector, Verdict};
use switchgraph::dag::DagInstance;
use switchgraph::digicomp::{run_digicomp_fast, run_digicomp_naive};
use switchgraph::gadgets::{build_ball_counter, build_train_counter, CounterGadget, Port, Target};
use switchgraph::generate::{random_dag, random_digicomp, seeded};
use switchgraph::reductions::{reduce_dagpaths_to_digicomp, reduce_digicomp_to_arrival, Role};
use switchgraph::{DigicompInstance, SwitchGraph, VertexId};

// ---------------------------------------------------------------- oracles

fn bits(x: u64) -> usize {
    (u64::BITS - x.leading_zeros()) as usize
}

/// Walks a counter fragment directly from its exit table, `entries` times,
/// starting each entry at node 0 with switches carried over. The callback
/// sees each exit together with the switch vector after it.
fn walk_counter(g: &CounterGadget, entries: usize, mut seen: impl FnMut(Port, &[bool])) {
    let mut sw = vec![false; g.len()];
    for _ in 0..entries {
        let mut node = 0;
        loop {
            let bit = sw[node];
            sw[node] = !bit;
            let next = if bit { g.s1(node) } else { g.s0(node) };
            match next {
                Target::Node(w) => node = w,
                Target::Port(p) => {
                    seen(p, &sw);
                    break;
                }
            }
        }
    }
}

/// Digicomp with one ball at a time. Returns per-vertex arrival counts.
fn drop_balls(graph: &SwitchGraph, origin: usize, balls: u64) -> Vec<u64> {
    let n = graph.len();
    let s0: Vec<usize> = (0..n).map(|v| graph.s0(VertexId::new(v)).index()).collect();
    let s1: Vec<usize> = (0..n).map(|v| graph.s1(VertexId::new(v)).index()).collect();
    let mut sw = vec![false; n];
    let mut arrivals = vec![0u64; n];
    for _ in 0..balls {
        let mut v = origin;
        arrivals[v] += 1;
        while !(s0[v] == v && s1[v] == v) {
            let w = if sw[v] { s1[v] } else { s0[v] };
            sw[v] = !sw[v];
            if w != v {
                arrivals[w] += 1;
            }
            v = w;
        }
    }
    arrivals
}

/// Number of source-to-sink paths, by plain recursion over every path.
fn count_paths(dag: &DagInstance) -> u64 {
    fn go(dag: &DagInstance, v: VertexId) -> u64 {
        if v == dag.sink() {
            return 1;
        }
        dag.successors(v).iter().map(|&w| go(dag, w)).sum()
    }
    go(dag, dag.source())
}

fn split_size(dag: &DagInstance) -> usize {
    (0..dag.len()).map(|v| 1 + dag.successors(VertexId::new(v)).len().saturating_sub(2)).sum()
}

/// Balls reaching each vertex, pulled from predecessors with memoisation.
/// `switch` gives the final switch bit of each vertex.
struct Halving<'a> {
    graph: &'a SwitchGraph,
    origin: usize,
    balls: BigUint,
    preds: Vec<Vec<usize>>,
    memo: HashMap<usize, BigUint>,
}

impl<'a> Halving<'a> {
    fn new(graph: &'a SwitchGraph, origin: usize, balls: BigUint) -> Self {
        let n = graph.len();
        let mut preds = vec![Vec::new(); n];
        for u in 0..n {
            let (a, b) = (graph.s0(VertexId::new(u)).index(), graph.s1(VertexId::new(u)).index());
            for w in [a, b] {
                if w != u && !preds[w].contains(&u) {
                    preds[w].push(u);
                }
            }
        }
        Halving { graph, origin, balls, preds, memo: HashMap::new() }
    }

    fn exits(&self, u: usize) -> (usize, usize) {
        (self.graph.s0(VertexId::new(u)).index(), self.graph.s1(VertexId::new(u)).index())
    }

    /// Balls `u` sends to `v` out of the `c` it received.
    fn share(&self, u: usize, v: usize, c: &BigUint) -> BigUint {
        let (a, b) = self.exits(u);
        let two = BigUint::from(2u8);
        let up = (c + 1u8) / &two;
        let down = c / &two;
        if a == u || b == u {
            return c.clone();
        }
        let mut total = BigUint::zero();
        if a == v {
            total += up;
        }
        if b == v {
            total += down;
        }
        total
    }

    fn count(&mut self, v: usize) -> BigUint {
        if let Some(c) = self.memo.get(&v) {
            return c.clone();
        }
        let mut c = if v == self.origin { self.balls.clone() } else { BigUint::zero() };
        for u in self.preds[v].clone() {
            let cu = self.count(u);
            c += self.share(u, v, &cu);
        }
        self.memo.insert(v, c.clone());
        c
    }

    fn switch(&mut self, v: usize) -> bool {
        let c = self.count(v);
        let (a, b) = self.exits(v);
        match (a == v, b == v) {
            (true, true) | (true, false) => false,
            (false, true) => !c.is_zero(),
            (false, false) => (&c % 2u8).is_one(),
        }
    }
}

// ---------------------------------------------------------------- criteria

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn counter_size_law() -> Outcome {
    for t in 1..=4096u64 {
        let big = BigUint::from(t);
        let train = build_train_counter(&big).unwrap().len();
        let ball = build_ball_counter(&big).unwrap().len();
        if train != bits(t) || ball != bits(t) {
            return fail(format!("T={t}: train {train}, ball {ball}, expected {}", bits(t)));
        }
    }
    pass("T in 1..=4096")
}

fn train_period_holds(t: u64) -> Result<(), String> {
    let g = build_train_counter(&BigUint::from(t)).unwrap();
    let period = t as usize + 1;
    let mut trace = Vec::with_capacity(2 * period);
    let mut reset = true;
    walk_counter(&g, 2 * period, |p, sw| {
        trace.push(p);
        if p == Port::B && sw.iter().any(|&b| b) {
            reset = false;
        }
    });
    let expected: Vec<Port> =
        (0..2 * period).map(|i| if i % period == t as usize { Port::B } else { Port::A }).collect();
    if trace != expected {
        return Err(format!("T={t}: exit trace differs from (A^T B)^2"));
    }
    if !reset {
        return Err(format!("T={t}: switches not all zero after a B exit"));
    }
    Ok(())
}

fn train_counter_semantics() -> Outcome {
    for t in 1..=1024 {
        if let Err(e) = train_period_holds(t) {
            return fail(e);
        }
    }
    let mut rng = seeded(0xacce97);
    for _ in 0..100 {
        let t = rng.gen_range(1..=1u64 << 20);
        if let Err(e) = train_period_holds(t) {
            return fail(e);
        }
    }
    pass("T in 1..=1024 and 100 random T <= 2^20")
}

fn figures() -> Outcome {
    for t in [16u64, 22] {
        let g = build_train_counter(&BigUint::from(t)).unwrap();
        let mut trace = Vec::new();
        walk_counter(&g, t as usize + 1, |p, _| trace.push(p));
        let a_exits = trace.iter().take_while(|&&p| p == Port::A).count();
        if a_exits != t as usize || trace.last() != Some(&Port::B) {
            return fail(format!("T={t}: {a_exits} A-exits before B"));
        }
    }
    let g = build_train_counter(&BigUint::from(22u8)).unwrap();
    let expected = [Target::Port(Port::A), Target::Node(0), Target::Port(Port::A), Target::Port(Port::A), Target::Node(0)];
    let got: Vec<Target> = (0..g.len()).map(|i| g.s0(i)).collect();
    if got != expected {
        return fail(format!("T=22 s0 pattern {got:?}"));
    }
    pass("T=16 and T=22 traces, T=22 s0 pattern")
}

fn ball_counter_threshold() -> Outcome {
    for t in 1..=1024u64 {
        let g = build_ball_counter(&BigUint::from(t)).unwrap();
        let mut first_d = None;
        let mut ball = 0;
        walk_counter(&g, t as usize + 1, |p, _| {
            ball += 1;
            if p == Port::D && first_d.is_none() {
                first_d = Some(ball);
            }
        });
        if first_d != Some(t + 1) {
            return fail(format!("T={t}: first D exit at {first_d:?}"));
        }
    }
    pass("T in 1..=1024")
}

fn engine_agreement() -> Outcome {
    let mut rng = seeded(5);
    for case in 0..500 {
        let n = rng.gen_range(1..=12);
        let t: u64 = rng.gen_range(0..=64);
        let inst = random_digicomp(&mut rng, n, t.into());
        let naive = run_digicomp_naive(&inst, None).unwrap();
        let fast = run_digicomp_fast(&inst).unwrap();
        if naive != fast {
            return fail(format!("case {case}: engines disagree"));
        }
        let oracle = drop_balls(inst.graph(), inst.origin().index(), t);
        let counts: Vec<u64> = fast.counts.arrivals.iter().map(|c| c.to_u64().unwrap()).collect();
        if counts != oracle {
            return fail(format!("case {case}: counts differ from one-ball simulation"));
        }
    }
    pass("500 cases")
}

struct SizeAudit {
    checked: usize,
    mismatch: Option<String>,
}

impl SizeAudit {
    fn record(&mut self, what: &str, got: usize, expected: usize) {
        self.checked += 1;
        if got != expected && self.mismatch.is_none() {
            self.mismatch = Some(format!("{what}: {got} vertices, expected {expected}"));
        }
    }
}

fn prop1(audit: &mut SizeAudit) -> Outcome {
    let mut rng = seeded(6);
    for case in 0..200 {
        let n = rng.gen_range(1..=10);
        let t: u64 = rng.gen_range(0..=32);
        let inst = random_digicomp(&mut rng, n, t.into());
        let expected = drop_balls(inst.graph(), inst.origin().index(), t)[inst.destination().index()] > 0;
        let reduced = reduce_digicomp_to_arrival(&inst).instance;
        audit.record(&format!("prop1 case {case}"), reduced.graph.len(), if t == 0 { 2 } else { n + bits(t) + 1 });
        let verdict = run_arrival(&reduced, None, Detector::HashSet).unwrap().verdict;
        if (verdict == Verdict::Arrives) != expected {
            return fail(format!("case {case}: {verdict:?}, digicomp reaches = {expected}"));
        }
    }
    pass("200 cases")
}

struct Prop2Case {
    count: u64,
    feed_bit: bool,
}

fn prop2(audit: &mut SizeAudit, cases: &mut Vec<Prop2Case>) -> Outcome {
    let mut rng = seeded(7);
    for case in 0..200 {
        let n = rng.gen_range(1..=8);
        let k: u64 = rng.gen_range(1..=20);
        let dag = random_dag(&mut rng, n, 5, k.into());
        let count = count_paths(&dag);
        let split = split_size(&dag);
        let reduced = reduce_dagpaths_to_digicomp(&dag).unwrap();
        let inst = &reduced.instance;
        let counter = if k >= 2 { bits(k - 1) } else { 0 };
        audit.record(&format!("prop2 case {case}"), inst.graph().len(), split * split + 2 + counter);
        let out = run_digicomp_fast(inst).unwrap();
        if out.reached != (count >= k) {
            return fail(format!("case {case}: reached = {}, paths = {count}, k = {k}", out.reached));
        }
        let roles = &reduced.certificate.roles;
        let entry_role = if k >= 2 { Role::Counter { index: 0 } } else { Role::Destination };
        let entry = roles.iter().position(|r| *r == entry_role).unwrap();
        if out.counts.arrivals[entry] != BigUint::from(count) {
            return fail(format!("case {case}: counter entry saw {}, paths = {count}", out.counts.arrivals[entry]));
        }
        let feed_role = Role::Layered { vertex: dag.sink().index(), layer: split - 1 };
        let feed = roles.iter().position(|r| *r == feed_role).unwrap();
        cases.push(Prop2Case { count, feed_bit: out.counts.final_switches.get(feed) });
    }
    pass("200 cases")
}

fn compose(audit: &mut SizeAudit) -> Outcome {
    let mut rng = seeded(8);
    for case in 0..50 {
        let n = rng.gen_range(1..=6);
        let k: u64 = rng.gen_range(1..=8);
        let dag = random_dag(&mut rng, n, 3, k.into());
        let count = count_paths(&dag);
        let mid = reduce_dagpaths_to_digicomp(&dag).unwrap().instance;
        let split = split_size(&dag);
        let arrival = reduce_digicomp_to_arrival(&mid).instance;
        // 2^(split-1) balls need a `split`-node train counter.
        audit.record(&format!("compose case {case}"), arrival.graph.len(), mid.graph().len() + split + 1);
        let verdict = run_arrival(&arrival, None, Detector::HashSet).unwrap().verdict;
        if (verdict == Verdict::Arrives) != (count >= k) {
            return fail(format!("case {case}: {verdict:?}, paths = {count}, k = {k}"));
        }
    }
    pass("50 cases")
}

fn parity(cases: &[Prop2Case]) -> Outcome {
    if cases.is_empty() {
        return fail("no cases recorded");
    }
    match cases.iter().position(|c| c.feed_bit != (c.count % 2 == 1)) {
        Some(i) => fail(format!("case {i}: bit {}, paths = {}", cases[i].feed_bit, cases[i].count)),
        None => pass(format!("{} cases", cases.len())),
    }
}

/// Ten vertices covering both self-loop shapes, a fan-in and two sinks.
fn exponential_instance(balls: BigUint) -> DigicompInstance {
    let graph = SwitchGraph::from_pairs(&[
        (1, 2),
        (1, 3),
        (4, 2),
        (4, 5),
        (5, 6),
        (6, 7),
        (7, 8),
        (8, 9),
        (8, 8),
        (9, 9),
    ])
    .unwrap();
    DigicompInstance::new(graph, VertexId::new(0), VertexId::new(9), balls).unwrap()
}

fn halving_matches(inst: &DigicompInstance, counts: &[BigUint], switches: impl Fn(usize) -> bool) -> bool {
    let mut oracle = Halving::new(inst.graph(), inst.origin().index(), inst.balls().clone());
    (0..inst.graph().len()).all(|v| oracle.count(v) == counts[v] && oracle.switch(v) == switches(v))
}

fn exponential_scale() -> Outcome {
    // The recurrence oracle itself is first checked against one-ball
    // simulation on small ball counts.
    for t in 0..=40u64 {
        let inst = exponential_instance(t.into());
        let sim: Vec<BigUint> = drop_balls(inst.graph(), 0, t).into_iter().map(BigUint::from).collect();
        let naive = run_digicomp_naive(&inst, None).unwrap();
        if !halving_matches(&inst, &sim, |v| naive.counts.final_switches.get(v)) {
            return fail(format!("halving oracle disagrees with simulation at T={t}"));
        }
    }
    let inst = exponential_instance(BigUint::one() << 256u32);
    let start = Instant::now();
    let out = run_digicomp_fast(&inst).unwrap();
    let elapsed = start.elapsed();
    if !halving_matches(&inst, &out.counts.arrivals, |v| out.counts.final_switches.get(v)) {
        return fail("fast engine counts differ from the halving recurrence");
    }
    if !out.reached {
        return fail("destination not reached");
    }
    if elapsed >= Duration::from_secs(5) {
        return fail(format!("took {elapsed:?}"));
    }
    pass(format!("T=2^256 decided in {elapsed:?}"))
}

fn timed(name: &'static str, limit_secs: u64, run: impl FnOnce() -> Outcome) -> (&'static str, Outcome) {
    let start = Instant::now();
    let mut outcome = run();
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(limit_secs) {
        outcome = fail(format!("{} (took {elapsed:?}, limit {limit_secs}s)", outcome.detail));
    }
    (name, outcome)
}

fn main() -> ExitCode {
    let mut audit = SizeAudit { checked: 0, mismatch: None };
    let mut prop2_cases = Vec::new();
    let mut results = vec![
        timed("counter-size-law", 10, counter_size_law),
        timed("train-counter-semantics", 60, train_counter_semantics),
        timed("counter-figures", 10, figures),
        timed("ball-counter-threshold", 60, ball_counter_threshold),
        timed("engine-agreement", 60, engine_agreement),
        timed("digicomp-to-arrival", 120, || prop1(&mut audit)),
        timed("dagpaths-to-digicomp", 120, || prop2(&mut audit, &mut prop2_cases)),
        timed("composition", 120, || compose(&mut audit)),
    ];
    results.push(timed("parity-diagnostic", 10, || parity(&prop2_cases)));
    results.push(timed("exponential-scale", 10, exponential_scale));
    let size = match audit.mismatch {
        Some(m) => fail(m),
        None if audit.checked == 0 => fail("no reductions audited"),
        None => pass(format!("{} reductions", audit.checked)),
    };
    results.push(("size-bound-audit", size));

    let mut all = true;
    for (i, (name, outcome)) in results.iter().enumerate() {
        all &= outcome.ok;
        let tag = if outcome.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} {name}: {}", i + 1, outcome.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
