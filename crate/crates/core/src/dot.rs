//! Graphviz output. Node names are positional: places `p<i>`, transitions
//! `t<i>`, markings `m<i>`, LTS states `s<i>`; the readable names go into
//! labels.

use std::fmt::Write;

use crate::compose::GlobalTransition;
use crate::mas::Lts;
use crate::net::{LabelledNet, MarkingGraph};

/// Quotes `s` as a DOT string.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Places as circles (marked ones filled), transitions as boxes labelled by
/// their label. With `fused`, each box also carries its component
/// transitions as an external label.
pub fn net_to_dot(net: &LabelledNet, fused: Option<&[GlobalTransition]>) -> String {
    let mut out = String::from("digraph net {\n  rankdir=LR;\n");
    for (i, p) in net.places().iter().enumerate() {
        let marked = net.initial_marking().contains(i);
        let _ = writeln!(
            out,
            "  p{i} [shape=circle, label={}{}];",
            quote(p),
            if marked { ", style=filled, fillcolor=gray80" } else { "" }
        );
    }
    for (i, t) in net.transitions().iter().enumerate() {
        let _ = write!(out, "  t{i} [shape=box, label={}", quote(&t.label));
        if let Some(g) = fused.and_then(|f| f.get(i)) {
            let parts: Vec<&str> = g.components.values().map(String::as_str).collect();
            let _ = write!(out, ", xlabel={}", quote(&parts.join("\n")));
        }
        out.push_str("];\n");
    }
    for (i, t) in net.transitions().iter().enumerate() {
        for p in &t.preset {
            let _ = writeln!(out, "  p{p} -> t{i};");
        }
        for p in &t.postset {
            let _ = writeln!(out, "  t{i} -> p{p};");
        }
    }
    out.push_str("}\n");
    out
}

pub fn marking_graph_to_dot(mg: &MarkingGraph, net: &LabelledNet) -> String {
    let mut out = String::from("digraph marking_graph {\n");
    for (i, m) in mg.markings().iter().enumerate() {
        let shape = if i == MarkingGraph::INITIAL { "doublecircle" } else { "ellipse" };
        let _ = writeln!(out, "  m{i} [shape={shape}, label={}];", quote(&net.render_marking(m)));
    }
    for a in mg.arcs() {
        let _ = writeln!(out, "  m{} -> m{} [label={}];", a.source, a.target, quote(&a.label));
    }
    out.push_str("}\n");
    out
}

pub fn lts_to_dot(lts: &Lts) -> String {
    let states: Vec<&String> = lts.states().iter().collect();
    let idx = |s: &str| states.iter().position(|x| x.as_str() == s).expect("known state");
    let mut out = String::from("digraph lts {\n");
    for (i, s) in states.iter().enumerate() {
        let shape = if s.as_str() == lts.initial() { "doublecircle" } else { "ellipse" };
        let _ = writeln!(out, "  s{i} [shape={shape}, label={}];", quote(s));
    }
    for (s, e, t) in lts.arcs() {
        let _ = writeln!(out, "  s{} -> s{} [label={}];", idx(s), idx(t), quote(e));
    }
    out.push_str("}\n");
    out
}
