//! Graphviz output. Node order and edge order follow construction order, so
//! identical inputs give byte-identical text.

use std::fmt::Write as _;

use crate::model::Nfa;
use crate::observer::Observer;
use crate::projection::{ProjectedAutomaton, Sipa, Tag};
use crate::strong::VerifierAutomaton;
use crate::tree::{StateTree, TreeKind};

fn quote(s: &str) -> String {
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

struct Dot {
    text: String,
}

impl Dot {
    fn new(name: &str) -> Self {
        Dot {
            text: format!("digraph {name} {{\n  rankdir=LR;\n"),
        }
    }

    fn line(&mut self, s: &str) {
        self.text.push_str("  ");
        self.text.push_str(s);
        self.text.push_str(";\n");
    }

    fn node(&mut self, id: &str, attrs: &str) {
        if attrs.is_empty() {
            self.line(&quote(id));
        } else {
            self.line(&format!("{} [{attrs}]", quote(id)));
        }
    }

    fn initial(&mut self, targets: impl IntoIterator<Item = String>) {
        self.line("__init [shape=point]");
        for t in targets {
            self.line(&format!("__init -> {}", quote(&t)));
        }
    }

    fn edge(&mut self, from: &str, label: &str, to: &str) {
        self.line(&format!(
            "{} -> {} [label={}]",
            quote(from),
            quote(to),
            quote(label)
        ));
    }

    fn finish(mut self) -> String {
        self.text.push_str("}\n");
        self.text
    }
}

pub fn observer_dot(nfa: &Nfa, obs: &Observer) -> String {
    let mut d = Dot::new("observer");
    let label = |q| nfa.format_set(obs.state(q));
    for (q, s) in obs.states() {
        let attrs = if !s.is_empty() && s.is_subset(nfa.secret()) {
            "style=filled, fillcolor=lightgray"
        } else {
            ""
        };
        d.node(&label(q), attrs);
    }
    d.initial([label(obs.initial())]);
    for (p, e, q) in obs.transitions() {
        d.edge(&label(p), &nfa.event(e).name, &label(q));
    }
    d.finish()
}

pub fn projected_dot(nfa: &Nfa, pa: &ProjectedAutomaton) -> String {
    let mut d = Dot::new("projected");
    for x in nfa.states() {
        let attrs = if nfa.is_secret(x) {
            "style=filled, fillcolor=lightgray"
        } else {
            ""
        };
        d.node(nfa.state_name(x), attrs);
    }
    d.initial(pa.initial.iter().map(|x| nfa.state_name(x).to_string()));
    for &(a, e, b) in &pa.transitions {
        d.edge(nfa.state_name(a), &nfa.event(e).name, nfa.state_name(b));
    }
    d.finish()
}

pub fn sipa_dot(nfa: &Nfa, sipa: &Sipa) -> String {
    let mut d = Dot::new("sipa");
    for t in sipa.states() {
        let attrs = if t.tag == Tag::Y { "style=dashed" } else { "" };
        d.node(&t.label(nfa), attrs);
    }
    d.initial(sipa.initial().iter().map(|t| t.label(nfa)));
    for (a, e, b) in sipa.transitions() {
        d.edge(&a.label(nfa), &nfa.event(*e).name, &b.label(nfa));
    }
    d.finish()
}

pub fn verifier_dot(nfa: &Nfa, ver: &VerifierAutomaton) -> String {
    let mut d = Dot::new("verifier");
    let label = |v| {
        let (a, b) = ver.state(v);
        nfa.format_pair(a, b)
    };
    for (v, (_, x2)) in ver.states() {
        d.node(&label(v), if x2.is_empty() { "peripheries=2" } else { "" });
    }
    d.initial([label(ver.initial())]);
    for (p, e, q) in ver.transitions() {
        d.edge(&label(p), &nfa.event(e).name, &label(q));
    }
    d.finish()
}

/// Tree nodes are `n0, n1, ...` in breadth-first order, labeled with their pair.
pub fn tree_dot(nfa: &Nfa, tree: &StateTree) -> String {
    let name = match tree.kind {
        TreeKind::Weak => "state_tree",
        TreeKind::SecretUnvisited => "sst",
    };
    let mut text = format!("digraph {name} {{\n  rankdir=LR;\n");
    for (i, n) in tree.nodes().iter().enumerate() {
        let extra = if n.x2.is_empty() {
            ", peripheries=2"
        } else {
            ""
        };
        let _ = writeln!(
            text,
            "  n{i} [label={}{extra}];",
            quote(&nfa.format_pair(&n.x1, &n.x2))
        );
    }
    for &(p, e, c) in tree.edges() {
        let _ = writeln!(
            text,
            "  n{p} -> n{c} [label={}];",
            quote(&nfa.event(e).name)
        );
    }
    text.push_str("}\n");
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::observer::build_observer;
    use crate::projection::{build_projected_automaton, build_sipa, build_sipa_with, SipaUniverse};
    use crate::strong::{build_sst, build_verifier};
    use crate::weak::build_weak_state_tree;

    #[test]
    fn quoting() {
        assert_eq!(quote("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }

    #[test]
    fn g2_verifier_dot() {
        let g = fixtures::g2();
        let obs = build_observer(&g);
        let ver = build_verifier(&g, &obs, &build_sipa(&g));
        let text = verifier_dot(&g, &ver);
        assert!(text.contains("\"({3,6,9},{})\" [peripheries=2];"));
        assert!(text.contains("\"({3,6,9},{})\" -> \"({3,6,9},{})\" [label=\"d\"];"));
        assert!(text.contains("__init -> \"({0},{0})\";"));
        assert_eq!(
            text,
            verifier_dot(&g, &build_verifier(&g, &obs, &build_sipa(&g)))
        );
    }

    #[test]
    fn observer_and_fragment() {
        let f = fixtures::g8_fragment();
        let text = observer_dot(&f, &build_observer(&f));
        assert_eq!(
            text,
            "digraph observer {\n  rankdir=LR;\n  \"{0,1}\";\n  __init [shape=point];\n  __init -> \"{0,1}\";\n}\n"
        );
    }

    #[test]
    fn other_structures() {
        let g = fixtures::g2();
        let obs = build_observer(&g);
        let pa = projected_dot(&g, &build_projected_automaton(&g));
        assert!(pa.contains("\"0\" -> \"1\" [label=\"a\"];"));
        assert!(pa.contains("\"1\" [style=filled, fillcolor=lightgray];"));
        let s = sipa_dot(&g, &build_sipa(&g));
        assert!(s.contains("\"0_N\" -> \"1_Y\" [label=\"a\"];"));
        let root = g.parse_states(&["1", "4", "7"]).unwrap();
        let sst = build_sst(&g, &obs, &build_sipa_with(&g, SipaUniverse::Full), &root, 2).unwrap();
        let t = tree_dot(&g, &sst);
        assert_eq!(t.matches(" [label=\"(").count(), 3);
        assert!(t.contains("n2 [label=\"({3,6,9},{})\", peripheries=2];"));
        let weak = tree_dot(&g, &build_weak_state_tree(&g, &obs, &root, 2).unwrap());
        assert!(weak.starts_with("digraph state_tree {"));
    }
}
