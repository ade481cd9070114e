//! Graphviz export: solid edges for `s0`, dashed edges for `s1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{SwitchGraph, VertexId};

/// Extra annotation for one vertex in a DOT rendering.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotMark {
    pub label: Option<String>,
    pub color: Option<String>,
}

impl DotMark {
    pub fn label(label: impl Into<String>) -> Self {
        DotMark { label: Some(label.into()), color: None }
    }

    pub fn with_color(mut self, color: impl Into<String>) -> Self {
        self.color = Some(color.into());
        self
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn export_dot(graph: &SwitchGraph, marks: &BTreeMap<VertexId, DotMark>) -> String {
    let mut out = String::from("digraph switchgraph {\n");
    for v in graph.vertices() {
        let mark = marks.get(&v);
        let label = mark
            .and_then(|m| m.label.as_deref())
            .or_else(|| graph.label(v))
            .map(|l| format!("{v}: {l}"))
            .unwrap_or_else(|| v.to_string());
        write!(out, "  {v} [label=\"{}\"", escape(&label)).unwrap();
        if let Some(color) = mark.and_then(|m| m.color.as_deref()) {
            write!(out, ", style=filled, fillcolor=\"{}\"", escape(color)).unwrap();
        }
        out.push_str("];\n");
    }
    for v in graph.vertices() {
        writeln!(out, "  {v} -> {} [style=solid];", graph.s0(v)).unwrap();
        writeln!(out, "  {v} -> {} [style=dashed];", graph.s1(v)).unwrap();
    }
    out.push_str("}\n");
    out
}
