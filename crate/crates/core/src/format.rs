//! Line-oriented text format for instances.
//!
//! ```text
//! switchgraph v1 <arrival|digicomp|dag>
//! n <count>
//! v <id> <s0> <s1> [label]          # dag: v <id> <succ-count> <succ>...
//! s <id>
//! t <id>
//! balls <decimal>                   # digicomp only
//! k <decimal>                       # dag only
//! ```
//!
//! The header must come first and `n` second. Vertex lines may appear in
//! any order; everything from `#` to the end of a line is ignored.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigUint;

use crate::dag::DagInstance;
use crate::model::{ArrivalInstance, DigicompInstance, ModelError, SwitchGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Arrival,
    Digicomp,
    Dag,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Arrival => "arrival",
            InstanceKind::Digicomp => "digicomp",
            InstanceKind::Dag => "dag",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arrival" => Ok(InstanceKind::Arrival),
            "digicomp" => Ok(InstanceKind::Digicomp),
            "dag" => Ok(InstanceKind::Dag),
            other => Err(format!("unknown instance kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Arrival(ArrivalInstance),
    Digicomp(DigicompInstance),
    Dag(DagInstance),
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Arrival(_) => InstanceKind::Arrival,
            Instance::Digicomp(_) => InstanceKind::Digicomp,
            Instance::Dag(_) => InstanceKind::Dag,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Instance::Arrival(i) => serialize_arrival(i),
            Instance::Digicomp(i) => serialize_digicomp(i),
            Instance::Dag(i) => serialize_dag(i),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: vertex {vertex} refers to {target}, which is not in [0, {n})")]
    DanglingReference { line: usize, vertex: usize, target: usize, n: usize },
    #[error("line {line}: vertex {id} is defined twice (first on line {first})")]
    DuplicateVertex { line: usize, id: usize, first: usize },
    #[error("line {line}: field `{field}` appears twice")]
    DuplicateField { line: usize, field: &'static str },
    #[error("missing header field `{0}`")]
    MissingField(&'static str),
    #[error("vertex {0} is declared by `n` but never defined")]
    MissingVertex(usize),
    #[error("line {line}: field `{field}` is not allowed in a {kind} instance")]
    FieldNotAllowed { line: usize, field: String, kind: InstanceKind },
    #[error("expected a {expected} instance, found {found}")]
    KindMismatch { expected: InstanceKind, found: InstanceKind },
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

/// Parses an instance whose header must name `expected`.
pub fn parse_instance(text: &str, expected: InstanceKind) -> Result<Instance, FormatError> {
    let instance = parse_any(text)?;
    if instance.kind() != expected {
        return Err(FormatError::KindMismatch { expected, found: instance.kind() });
    }
    Ok(instance)
}

pub fn parse_bytes(bytes: &[u8], expected: InstanceKind) -> Result<Instance, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|_| FormatError::Utf8)?;
    parse_instance(text, expected)
}

pub fn parse_arrival(text: &str) -> Result<ArrivalInstance, FormatError> {
    match parse_instance(text, InstanceKind::Arrival)? {
        Instance::Arrival(i) => Ok(i),
        _ => unreachable!(),
    }
}

pub fn parse_digicomp(text: &str) -> Result<DigicompInstance, FormatError> {
    match parse_instance(text, InstanceKind::Digicomp)? {
        Instance::Digicomp(i) => Ok(i),
        _ => unreachable!(),
    }
}

pub fn parse_dag(text: &str) -> Result<DagInstance, FormatError> {
    match parse_instance(text, InstanceKind::Dag)? {
        Instance::Dag(i) => Ok(i),
        _ => unreachable!(),
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// A content line with comments stripped, split into whitespace-separated
/// tokens that remember their 1-based column.
struct Line<'a> {
    number: usize,
    content: &'a str,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn new(number: usize, raw: &'a str) -> Self {
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let content = content.trim_end_matches(['\r', ' ', '\t']);
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    tokens.push(Token { text: &content[s..i], column: content[..s].chars().count() + 1 });
                    start = None;
                }
                _ => {}
            }
        }
        Line { number, content, tokens }
    }

    fn error(&self, column: usize, message: impl Into<String>) -> FormatError {
        FormatError::Syntax { line: self.number, column, message: message.into() }
    }

    fn end_column(&self) -> usize {
        self.content.chars().count() + 1
    }

    fn token(&self, i: usize, what: &str) -> Result<&Token<'a>, FormatError> {
        self.tokens.get(i).ok_or_else(|| self.error(self.end_column(), format!("expected {what}")))
    }

    fn natural(&self, i: usize, what: &str) -> Result<usize, FormatError> {
        let tok = self.token(i, what)?;
        if !is_decimal(tok.text) {
            return Err(self.error(tok.column, format!("expected {what}, found `{}`", tok.text)));
        }
        tok.text
            .parse()
            .map_err(|_| self.error(tok.column, format!("{what} `{}` is too large", tok.text)))
    }

    fn big_natural(&self, i: usize, what: &str) -> Result<BigUint, FormatError> {
        let tok = self.token(i, what)?;
        if !is_decimal(tok.text) {
            return Err(self.error(tok.column, format!("expected {what}, found `{}`", tok.text)));
        }
        Ok(tok.text.parse().expect("decimal digits"))
    }

    fn expect_len(&self, len: usize) -> Result<(), FormatError> {
        match self.tokens.get(len) {
            Some(extra) => Err(self.error(extra.column, format!("unexpected token `{}`", extra.text))),
            None => Ok(()),
        }
    }

    /// Text after token `i`, trimmed; used for vertex labels.
    fn rest_after(&self, i: usize) -> Option<&'a str> {
        let tok = self.tokens.get(i)?;
        let end = tok.text.as_ptr() as usize - self.content.as_ptr() as usize + tok.text.len();
        let rest = self.content[end..].trim();
        (!rest.is_empty()).then_some(rest)
    }
}

fn is_decimal(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

enum Successors {
    Switch { s0: usize, s1: usize, label: Option<String> },
    Dag(Vec<usize>),
}

/// Parses an instance of whatever kind its header declares.
pub fn parse_any(text: &str) -> Result<Instance, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| Line::new(i + 1, raw))
        .filter(|l| !l.tokens.is_empty());

    let header = lines.next().ok_or(FormatError::MissingField("switchgraph"))?;
    if header.tokens[0].text != "switchgraph" {
        return Err(header.error(header.tokens[0].column, "expected header `switchgraph v1 <kind>`"));
    }
    let version = header.token(1, "format version")?;
    if version.text != "v1" {
        return Err(header.error(version.column, format!("unsupported format version `{}`", version.text)));
    }
    let kind_tok = header.token(2, "instance kind")?;
    let kind: InstanceKind = kind_tok.text.parse().map_err(|e| header.error(kind_tok.column, e))?;
    header.expect_len(3)?;

    let n_line = lines.next().ok_or(FormatError::MissingField("n"))?;
    if n_line.tokens[0].text != "n" {
        return Err(n_line.error(n_line.tokens[0].column, "expected `n <count>` after the header"));
    }
    let n = n_line.natural(1, "vertex count")?;
    n_line.expect_len(2)?;
    if u32::try_from(n).is_err() {
        return Err(n_line.error(n_line.tokens[1].column, "vertex count too large"));
    }

    let mut vertices: Vec<Option<(usize, Successors)>> = (0..n).map(|_| None).collect();
    let mut origin: Option<usize> = None;
    let mut destination: Option<usize> = None;
    let mut extra: Option<BigUint> = None;

    for line in lines {
        let field = line.tokens[0].text;
        match field {
            "v" => {
                let id = line.natural(1, "vertex id")?;
                if id >= n {
                    return Err(line.error(line.tokens[1].column, format!("vertex id {id} is not in [0, {n})")));
                }
                let succ = match kind {
                    InstanceKind::Dag => {
                        let count = line.natural(2, "successor count")?;
                        let mut succ = Vec::with_capacity(count.min(n));
                        for j in 0..count {
                            succ.push(line.natural(3 + j, "successor id")?);
                        }
                        line.expect_len(3 + count)?;
                        Successors::Dag(succ)
                    }
                    _ => {
                        let s0 = line.natural(2, "s0 target")?;
                        let s1 = line.natural(3, "s1 target")?;
                        let label = line.rest_after(3).map(str::to_owned);
                        Successors::Switch { s0, s1, label }
                    }
                };
                let targets: Vec<usize> = match &succ {
                    Successors::Switch { s0, s1, .. } => vec![*s0, *s1],
                    Successors::Dag(s) => s.clone(),
                };
                if let Some(&target) = targets.iter().find(|&&t| t >= n) {
                    return Err(FormatError::DanglingReference { line: line.number, vertex: id, target, n });
                }
                if let Some((first, _)) = &vertices[id] {
                    return Err(FormatError::DuplicateVertex { line: line.number, id, first: *first });
                }
                vertices[id] = Some((line.number, succ));
            }
            "s" | "t" => {
                let id = line.natural(1, "vertex id")?;
                line.expect_len(2)?;
                let (slot, name) = if field == "s" { (&mut origin, "s") } else { (&mut destination, "t") };
                if slot.replace(id).is_some() {
                    return Err(FormatError::DuplicateField { line: line.number, field: name });
                }
            }
            "balls" | "k" => {
                let allowed = matches!((field, kind), ("balls", InstanceKind::Digicomp) | ("k", InstanceKind::Dag));
                if !allowed {
                    return Err(FormatError::FieldNotAllowed { line: line.number, field: field.to_owned(), kind });
                }
                let value = line.big_natural(1, "decimal natural")?;
                line.expect_len(2)?;
                if extra.replace(value).is_some() {
                    return Err(FormatError::DuplicateField {
                        line: line.number,
                        field: if field == "k" { "k" } else { "balls" },
                    });
                }
            }
            other => {
                return Err(line.error(line.tokens[0].column, format!("unknown field `{other}`")));
            }
        }
    }

    let origin = VertexId::new(origin.ok_or(FormatError::MissingField("s"))?);
    let destination = VertexId::new(destination.ok_or(FormatError::MissingField("t"))?);
    let mut defined = Vec::with_capacity(n);
    for (id, v) in vertices.into_iter().enumerate() {
        defined.push(v.ok_or(FormatError::MissingVertex(id))?.1);
    }

    match kind {
        InstanceKind::Dag => {
            let threshold = extra.ok_or(FormatError::MissingField("k"))?;
            let successors = defined
                .into_iter()
                .map(|s| match s {
                    Successors::Dag(list) => list.into_iter().map(VertexId::new).collect(),
                    Successors::Switch { .. } => unreachable!(),
                })
                .collect();
            Ok(Instance::Dag(DagInstance::new(successors, origin, destination, threshold)?))
        }
        InstanceKind::Arrival | InstanceKind::Digicomp => {
            let mut s0 = Vec::with_capacity(n);
            let mut s1 = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for s in defined {
                match s {
                    Successors::Switch { s0: a, s1: b, label } => {
                        s0.push(VertexId::new(a));
                        s1.push(VertexId::new(b));
                        labels.push(label);
                    }
                    Successors::Dag(_) => unreachable!(),
                }
            }
            let graph = SwitchGraph::with_labels(s0, s1, labels)?;
            if kind == InstanceKind::Arrival {
                Ok(Instance::Arrival(ArrivalInstance::new(graph, origin, destination)?))
            } else {
                let balls = extra.ok_or(FormatError::MissingField("balls"))?;
                Ok(Instance::Digicomp(DigicompInstance::new(graph, origin, destination, balls)?))
            }
        }
    }
}

fn write_switch_graph(out: &mut String, kind: InstanceKind, graph: &SwitchGraph) {
    writeln!(out, "switchgraph v1 {kind}").unwrap();
    writeln!(out, "n {}", graph.len()).unwrap();
    for v in graph.vertices() {
        write!(out, "v {} {} {}", v, graph.s0(v), graph.s1(v)).unwrap();
        if let Some(label) = graph.label(v) {
            write!(out, " {label}").unwrap();
        }
        out.push('\n');
    }
}

pub fn serialize_arrival(instance: &ArrivalInstance) -> String {
    let mut out = String::new();
    write_switch_graph(&mut out, InstanceKind::Arrival, &instance.graph);
    writeln!(out, "s {}", instance.origin).unwrap();
    writeln!(out, "t {}", instance.destination).unwrap();
    out
}

pub fn serialize_digicomp(instance: &DigicompInstance) -> String {
    let mut out = String::new();
    write_switch_graph(&mut out, InstanceKind::Digicomp, instance.graph());
    writeln!(out, "s {}", instance.origin()).unwrap();
    writeln!(out, "t {}", instance.destination()).unwrap();
    writeln!(out, "balls {}", instance.balls()).unwrap();
    out
}

pub fn serialize_dag(instance: &DagInstance) -> String {
    let mut out = String::new();
    writeln!(out, "switchgraph v1 dag").unwrap();
    writeln!(out, "n {}", instance.len()).unwrap();
    for v in 0..instance.len() {
        let succ = instance.successors(VertexId::new(v));
        write!(out, "v {v} {}", succ.len()).unwrap();
        for w in succ {
            write!(out, " {w}").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "s {}", instance.source()).unwrap();
    writeln!(out, "t {}", instance.sink()).unwrap();
    writeln!(out, "k {}", instance.threshold()).unwrap();
    out
}
