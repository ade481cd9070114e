//! `switchgraph` command-line frontend.
//!
//! Exit codes: 0 ran and decided, 1 usage error, 2 parse or validation
//! error, 3 budget exhausted, 4 a verification property failed.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use switchgraph::arrival::{self, ArrivalError, Detector, Verdict};
use switchgraph::digicomp::{self, DigicompError, DigicompOutcome};
use switchgraph::dot::{export_dot, DotMark};
use switchgraph::format::{self, Instance, InstanceKind};
use switchgraph::gadgets::{build_ball_counter, build_train_counter, counter_exit_trace, CounterKind, Port};
use switchgraph::generate;
use switchgraph::reductions::{self, ReductionCertificate, Role};
use switchgraph::verify::{self, Suite, VerifyConfig};
use switchgraph::{SwitchGraph, VertexId};

#[derive(Parser)]
#[command(name = "switchgraph", version, about = "Simulate switch graphs, build counters and compile reductions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Hashset,
    ConstantMemory,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Naive,
    Fast,
}

#[derive(Clone, Copy, ValueEnum)]
enum CounterArg {
    Train,
    Ball,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceFrom {
    Digicomp,
    Dagpaths,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Counters,
    Prop1,
    Prop2,
    Compose,
    Parity,
}

#[derive(Clone, Copy, ValueEnum)]
enum RandomKind {
    Dag,
    AcyclicSwitchgraph,
}

#[derive(Subcommand)]
enum Command {
    /// Run the single-train semantics on an arrival instance.
    SimArrival {
        file: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value = "hashset")]
        detector: DetectorArg,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Drop the balls of a digicomp instance and report arrival counts.
    SimDigicomp {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "fast")]
        engine: EngineArg,
        /// Work budget for the naive engine.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Write a self-contained harness instance for a counter and its DOT rendering.
    GenCounter {
        target: BigUint,
        #[arg(long, value_enum)]
        kind: CounterArg,
        /// Instance path; the DOT file goes next to it with a `.dot` extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile an instance into another problem family.
    Reduce {
        #[arg(long, value_enum)]
        from: ReduceFrom,
        file: PathBuf,
        /// Instance path; the certificate goes to `<out>.cert.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a DOT rendering with role colouring.
        #[arg(long)]
        dot: bool,
    },
    /// Run a seeded property suite.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        cases: Option<usize>,
        /// Corrupt one edge of every produced artifact.
        #[arg(long)]
        inject_fault: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Check a reduction certificate against its source and produced instances.
    VerifyCertificate {
        certificate: PathBuf,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        produced: PathBuf,
    },
    /// Emit a seeded random instance.
    GenRandom {
        #[arg(long, value_enum)]
        kind: RandomKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        /// Path-count threshold for dag instances.
        #[arg(long, default_value = "1")]
        k: BigUint,
        /// Ball count for switch-graph instances.
        #[arg(long, default_value = "1")]
        balls: BigUint,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render any instance file as DOT.
    Dot { file: PathBuf },
}

enum Failure {
    Usage(String),
    Input(String),
    Budget(String),
    Verify,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Verify => 4,
        }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path, kind: InstanceKind) -> Result<Instance, Failure> {
    let text = read(path)?;
    format::parse_instance(&text, kind).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_any(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    format::parse_any(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(value: serde_json::Value) {
    emit(&(serde_json::to_string_pretty(&value).expect("json") + "\n"));
}

fn sim_arrival(file: &Path, budget: Option<u64>, detector: DetectorArg, fmt: OutputFormat) -> CliResult {
    let Instance::Arrival(inst) = load(file, InstanceKind::Arrival)? else { unreachable!() };
    let detector = match detector {
        DetectorArg::Hashset => Detector::HashSet,
        DetectorArg::ConstantMemory => Detector::ConstantMemory,
    };
    match arrival::run_arrival(&inst, budget, detector) {
        Ok(out) => {
            match (fmt, out.verdict) {
                (OutputFormat::Text, Verdict::Arrives) => println!("ARRIVES {}", out.steps),
                (OutputFormat::Text, Verdict::Diverges) => println!("DIVERGES"),
                (OutputFormat::Json, Verdict::Arrives) => {
                    print_json(json!({ "verdict": "ARRIVES", "steps": out.steps.to_string() }))
                }
                (OutputFormat::Json, Verdict::Diverges) => {
                    let w = out.witness.expect("divergence has a witness");
                    print_json(json!({
                        "verdict": "DIVERGES",
                        "steps": out.steps.to_string(),
                        "witness": {
                            "position": w.configuration.position.index(),
                            "earlier": w.earlier.to_string(),
                            "later": w.later.to_string(),
                        },
                    }))
                }
            }
            Ok(())
        }
        Err(ArrivalError::BudgetExhausted { steps }) => {
            match fmt {
                OutputFormat::Text => println!("UNDECIDED {steps}"),
                OutputFormat::Json => print_json(json!({ "verdict": "UNDECIDED", "steps": steps.to_string() })),
            }
            Err(Failure::Budget(format!("no verdict within {steps} steps")))
        }
    }
}

fn digicomp_report(out: &DigicompOutcome, fmt: OutputFormat) {
    let verdict = if out.reached { "YES" } else { "NO" };
    match fmt {
        OutputFormat::Text => {
            let mut text = format!("{verdict}\n");
            for (v, count) in out.counts.arrivals.iter().enumerate() {
                text += &format!("{v} {count} {}\n", u8::from(out.counts.final_switches.get(v)));
            }
            emit(&text);
        }
        OutputFormat::Json => print_json(json!({
            "verdict": verdict,
            "counts": out.counts.arrivals.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "final_switches": out.counts.final_switches.iter().map(u8::from).collect::<Vec<_>>(),
        })),
    }
}

fn sim_digicomp(file: &Path, engine: EngineArg, budget: Option<u64>, fmt: OutputFormat) -> CliResult {
    let Instance::Digicomp(inst) = load(file, InstanceKind::Digicomp)? else { unreachable!() };
    let result = match engine {
        EngineArg::Naive => digicomp::run_digicomp_naive(&inst, budget),
        EngineArg::Fast => digicomp::run_digicomp_fast(&inst),
    };
    match result {
        Ok(out) => {
            digicomp_report(&out, fmt);
            Ok(())
        }
        Err(e @ DigicompError::BudgetExhausted { .. }) => {
            match fmt {
                OutputFormat::Text => println!("UNDECIDED"),
                OutputFormat::Json => print_json(json!({ "verdict": "UNDECIDED" })),
            }
            Err(Failure::Budget(e.to_string()))
        }
        Err(e) => Err(Failure::Input(e.to_string())),
    }
}

/// Run-length form of an exit trace, e.g. `A^16 B`.
fn run_length(trace: &[Port]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < trace.len() {
        let j = trace[i..].iter().position(|&p| p != trace[i]).map_or(trace.len(), |k| i + k);
        parts.push(if j - i == 1 { trace[i].to_string() } else { format!("{}^{}", trace[i], j - i) });
        i = j;
    }
    parts.join(" ")
}

const TRACE_LIMIT: u32 = 1 << 16;

fn gen_counter(target: &BigUint, kind: CounterArg, out: Option<&Path>) -> CliResult {
    let guidance = "counters need T >= 1; for T = 0 wire the edge straight to the overflow target";
    let (gadget, text, graph) = match kind {
        CounterArg::Train => {
            let g = build_train_counter(target).map_err(|_| Failure::Usage(guidance.into()))?;
            let h = g.train_harness();
            let text = format::serialize_arrival(&h);
            (g, text, h.graph)
        }
        CounterArg::Ball => {
            let g = build_ball_counter(target).map_err(|_| Failure::Usage(guidance.into()))?;
            let h = g.ball_harness();
            let text = format::serialize_digicomp(&h);
            (g, text, h.graph().clone())
        }
    };
    let kind_name = match gadget.kind() {
        CounterKind::Train => "train",
        CounterKind::Ball => "ball",
    };
    let mut summary = format!("counter {kind_name} T={target} nodes={}\n", gadget.len());
    if target <= &BigUint::from(TRACE_LIMIT) {
        let entries = usize::try_from(target.clone()).expect("small target") + 1;
        summary += &format!("trace {}\n", run_length(&counter_exit_trace(&gadget, entries)));
    }
    match out {
        Some(path) => {
            write(path, &text)?;
            write(&path.with_extension("dot"), &export_dot(&graph, &BTreeMap::new()))?;
            emit(&summary);
        }
        None => {
            emit(&text);
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn role_marks(roles: &[Role]) -> BTreeMap<VertexId, DotMark> {
    roles
        .iter()
        .enumerate()
        .filter_map(|(v, role)| {
            let color = match role {
                Role::Counter { .. } => "lightblue",
                Role::Fail => "gray",
                Role::Destination => "palegreen",
                Role::Original { .. } | Role::Layered { .. } => return None,
            };
            Some((VertexId::new(v), DotMark { label: None, color: Some(color.into()) }))
        })
        .collect()
}

fn reduce(from: ReduceFrom, file: &Path, out: Option<&Path>, dot: bool) -> CliResult {
    let (text, graph, certificate): (String, SwitchGraph, ReductionCertificate) = match from {
        ReduceFrom::Digicomp => {
            let Instance::Digicomp(src) = load(file, InstanceKind::Digicomp)? else { unreachable!() };
            let r = reductions::reduce_digicomp_to_arrival(&src);
            (format::serialize_arrival(&r.instance), r.instance.graph, r.certificate)
        }
        ReduceFrom::Dagpaths => {
            let Instance::Dag(src) = load(file, InstanceKind::Dag)? else { unreachable!() };
            let r = reductions::reduce_dagpaths_to_digicomp(&src).map_err(|e| Failure::Input(e.to_string()))?;
            (format::serialize_digicomp(&r.instance), r.instance.graph().clone(), r.certificate)
        }
    };
    match out {
        Some(path) => {
            write(path, &text)?;
            write(&path.with_extension("cert.json"), &certificate.to_json())?;
            if dot {
                write(&path.with_extension("dot"), &export_dot(&graph, &role_marks(&certificate.roles)))?;
            }
            let p = &certificate.params;
            println!(
                "produced vertices={} source_vertices={} counter_vertices={} balls={}",
                p.produced_vertices, p.source_vertices, p.counter_vertices, p.balls
            );
        }
        None => {
            emit(&text);
            if dot {
                eprint!("{}", export_dot(&graph, &role_marks(&certificate.roles)));
            }
        }
    }
    Ok(())
}

fn run_verify(suite: SuiteArg, seed: u64, cases: Option<usize>, inject_fault: bool, fmt: OutputFormat) -> CliResult {
    let suite = match suite {
        SuiteArg::Counters => Suite::Counters,
        SuiteArg::Prop1 => Suite::Prop1,
        SuiteArg::Prop2 => Suite::Prop2,
        SuiteArg::Compose => Suite::Compose,
        SuiteArg::Parity => Suite::Parity,
    };
    let report = verify::run_suite(suite, &VerifyConfig { seed, cases, inject_fault });
    match fmt {
        OutputFormat::Text => emit(&report.to_string()),
        OutputFormat::Json => print_json(json!({
            "suite": suite.name(),
            "verdict": if report.passed() { "PASS" } else { "FAIL" },
            "properties": report.properties.iter().map(|p| json!({
                "name": p.name,
                "cases": p.cases,
                "failures": p.failures,
                "counterexample": p.counterexample,
            })).collect::<Vec<_>>(),
        })),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn verify_certificate(cert: &Path, source: &Path, produced: &Path) -> CliResult {
    let certificate =
        ReductionCertificate::from_json(&read(cert)?).map_err(|e| Failure::Input(format!("{}: {e}", cert.display())))?;
    let source = load_any(source)?;
    let produced = load_any(produced)?;
    match certificate.check(&source, &produced) {
        Ok(()) => {
            println!("PASS certificate");
            Ok(())
        }
        Err(e) => {
            println!("FAIL certificate: {e}");
            Err(Failure::Verify)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn gen_random(
    kind: RandomKind,
    n: usize,
    seed: u64,
    max_degree: usize,
    k: BigUint,
    balls: BigUint,
    out: Option<&Path>,
) -> CliResult {
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let mut rng = generate::seeded(seed);
    let text = match kind {
        RandomKind::Dag => format::serialize_dag(&generate::random_dag(&mut rng, n, max_degree, k)),
        RandomKind::AcyclicSwitchgraph => format::serialize_digicomp(&generate::random_digicomp(&mut rng, n, balls)),
    };
    match out {
        Some(path) => write(path, &text),
        None => {
            emit(&text);
            Ok(())
        }
    }
}

fn dot(file: &Path) -> CliResult {
    let graph = match load_any(file)? {
        Instance::Arrival(i) => i.graph,
        Instance::Digicomp(i) => i.graph().clone(),
        Instance::Dag(_) => return Err(Failure::Input("dag instances are not switch graphs".into())),
    };
    emit(&export_dot(&graph, &BTreeMap::new()));
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::SimArrival { file, budget, detector, format } => sim_arrival(&file, budget, detector, format),
        Command::SimDigicomp { file, engine, budget, format } => sim_digicomp(&file, engine, budget, format),
        Command::GenCounter { target, kind, out } => gen_counter(&target, kind, out.as_deref()),
        Command::Reduce { from, file, out, dot } => reduce(from, &file, out.as_deref(), dot),
        Command::Verify { suite, seed, cases, inject_fault, format } => {
            run_verify(suite, seed, cases, inject_fault, format)
        }
        Command::VerifyCertificate { certificate, source, produced } => {
            verify_certificate(&certificate, &source, &produced)
        }
        Command::GenRandom { kind, n, seed, max_degree, k, balls, out } => {
            gen_random(kind, n, seed, max_degree, k, balls, out.as_deref())
        }
        Command::Dot { file } => dot(&file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) | Failure::Input(msg) | Failure::Budget(msg) => eprintln!("error: {msg}"),
                Failure::Verify => {}
            }
            ExitCode::from(failure.code())
        }
    }
}
