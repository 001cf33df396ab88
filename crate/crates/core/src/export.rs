//! Deterministic DOT and JSON renderings of labeled graphs.
//!
//! A highlighted frame draws its owner edge dashed red, its path bold and its
//! cycles bold blue, so path and cycle edges stay distinguishable.

use std::fmt::Write;
use std::str::FromStr;

use crate::frames::Frame;
use crate::graph::{Family, LabeledGraph, NodeId, NodeLabel, SymNodeRole, TerminalRole};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown format {other:?}, expected dot or json")),
        }
    }
}

pub fn export_graph(g: &LabeledGraph, format: ExportFormat, highlight: Option<&Frame>) -> String {
    match format {
        ExportFormat::Dot => export_dot(g, highlight),
        ExportFormat::Json => g.to_json_string(),
    }
}

fn graph_name(g: &LabeledGraph) -> String {
    match g.family() {
        Some(Family::Cgk { k, r, closed }) => format!("{}_{k}_{r}", if closed { "L" } else { "G" }),
        Some(Family::SymPath { ell, q, closing_path }) => {
            format!("{}_{ell}_{q}", if closing_path { "Gp" } else { "G" })
        }
        None => "G".to_string(),
    }
}

fn node_label(g: &LabeledGraph, v: NodeId) -> String {
    if g.s() == Some(v) {
        return "s".to_string();
    }
    if g.t() == Some(v) {
        return "t".to_string();
    }
    match g.node_label(v) {
        Some(NodeLabel::Cgk { address, terminal }) => {
            let path: Vec<String> = address.iter().map(u32::to_string).collect();
            let role = match terminal {
                TerminalRole::Source => "s",
                TerminalRole::Sink => "t",
                TerminalRole::Point => "p",
            };
            format!("{role}[{}]", path.join("."))
        }
        Some(NodeLabel::Sym { role, index }) => {
            let tag = match role {
                SymNodeRole::TopPath => "top",
                SymNodeRole::BottomPath => "bot",
                SymNodeRole::LeftClique => "L",
                SymNodeRole::RightClique => "R",
                SymNodeRole::S => "s",
                SymNodeRole::T => "t",
                SymNodeRole::Connector => "c",
            };
            format!("{tag}{index}")
        }
        None => v.to_string(),
    }
}

pub fn export_dot(g: &LabeledGraph, highlight: Option<&Frame>) -> String {
    let (kind, arrow) = if g.directed() { ("digraph", "->") } else { ("graph", "--") };
    let mut out = String::new();
    writeln!(out, "{kind} {} {{", graph_name(g)).unwrap();
    for v in g.nodes() {
        writeln!(out, "  {v} [label=\"{}\"];", node_label(g, v)).unwrap();
    }
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let mut attrs = vec![format!("label=\"{}\"", g.weight(e))];
        if let Some(f) = highlight {
            if f.owner == e {
                attrs.push("style=dashed".into());
                attrs.push("color=red".into());
            } else if f.path.edges.contains(&e) {
                attrs.push("style=bold".into());
                attrs.push("penwidth=2.5".into());
            } else if f.cycles.iter().any(|c| c.contains(&e)) {
                attrs.push("style=bold".into());
                attrs.push("penwidth=2.5".into());
                attrs.push("color=blue".into());
            }
        }
        writeln!(out, "  {} {arrow} {} [{}];", edge.tail, edge.head, attrs.join(", ")).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::build_frame;
    use crate::graph::EdgeId;
    use crate::instances::{build_cgk_g, build_cgk_l, CgkParams};

    #[test]
    fn g13_dot_counts() {
        let g = build_cgk_g(CgkParams::new(1, 3).unwrap()).unwrap();
        let dot = export_dot(&g, None);
        assert!(dot.starts_with("digraph G_1_3 {"));
        assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 5);
        assert_eq!(dot.lines().filter(|l| l.contains(" -> ")).count(), 8);
        assert_eq!(dot, export_dot(&g, None));
    }

    #[test]
    fn highlighted_frame_marks_path_and_cycles() {
        let l = build_cgk_l(CgkParams::new(2, 3).unwrap()).unwrap();
        let e = l
            .edge_ids()
            .find(|&e| build_frame(&l, e).map(|f| !f.cycles.is_empty()).unwrap_or(false))
            .unwrap_or(EdgeId(0));
        let f = build_frame(&l, e).unwrap();
        let dot = export_dot(&l, Some(&f));
        let bold = dot.lines().filter(|l| l.contains("style=bold")).count();
        let blue = dot.lines().filter(|l| l.contains("color=blue")).count();
        assert_eq!(bold, f.size());
        assert_eq!(blue, f.cycles.iter().map(Vec::len).sum::<usize>());
        assert!(blue > 0 && blue < bold);
        assert_eq!(dot.lines().filter(|l| l.contains("color=red")).count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let l = build_cgk_l(CgkParams::new(2, 2).unwrap()).unwrap();
        let text = export_graph(&l, ExportFormat::Json, None);
        let back = LabeledGraph::from_json_str(&text).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.to_json_string(), text);
    }
}
