// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::{NodeKind, Sfg};

fn style(kind: NodeKind) -> (&'static str, &'static str) {
    match kind {
        NodeKind::Input => ("invhouse", "palegreen"),
        NodeKind::Output => ("house", "lightsalmon"),
        NodeKind::Constant => ("plaintext", "white"),
        NodeKind::MemData => ("cylinder", "lightblue"),
        NodeKind::Operation => ("circle", "khaki"),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the graph as a DOT digraph, nodes by id and edges by `(to, pos)`.
pub fn export_dot(g: &Sfg) -> String {
    let g = g.canonical();
    let mut out = String::from("digraph sfg {\n");
    for n in &g.nodes {
        let (shape, color) = style(n.kind);
        let label = match n.op {
            Some(op) if n.label.is_empty() => op.symbol().to_string(),
            Some(op) => format!("{}\\n{}", op.symbol(), escape(&n.label)),
            None => escape(&n.label),
        };
        writeln!(
            out,
            "  n{} [label=\"{}\", shape={}, style=filled, fillcolor={}];",
            n.id.0, label, shape, color
        )
        .unwrap();
    }
    for e in &g.edges {
        writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.from.0, e.to.0, e.pos).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::REFERENCE;
    use crate::graph::{generate_fft_sfg, parse_sfg};

    #[test]
    fn empty_graph() {
        assert_eq!(export_dot(&Sfg::new()), "digraph sfg {\n}\n");
    }

    #[test]
    fn reference_statement_counts() {
        let dot = export_dot(&parse_sfg(REFERENCE).unwrap());
        let nodes = dot
            .lines()
            .filter(|l| l.contains("[label=") && !l.contains("->"))
            .count();
        let edges = dot.lines().filter(|l| l.contains("->")).count();
        assert_eq!(nodes, 8);
        assert_eq!(edges, 7);
        assert!(dot.contains("shape=cylinder"));
    }

    /// Minimal DOT statement grammar: `ID [attrs];` or `ID -> ID [attrs];`
    /// inside one `digraph NAME { ... }` block.
    fn well_formed(dot: &str) -> bool {
        let mut lines = dot.lines();
        let Some(head) = lines.next() else { return false };
        if !(head.starts_with("digraph ") && head.ends_with('{')) {
            return false;
        }
        let body: Vec<&str> = lines.collect();
        let Some((last, stmts)) = body.split_last() else {
            return false;
        };
        if *last != "}" {
            return false;
        }
        let id = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        stmts.iter().all(|l| {
            let l = l.trim();
            let Some(stmt) = l.strip_suffix(';') else { return false };
            let (lhs, attrs) = match stmt.find(" [") {
                Some(i) => (&stmt[..i], &stmt[i + 1..]),
                None => (stmt, "[]"),
            };
            let balanced = attrs.starts_with('[') && attrs.ends_with(']') && attrs.matches('"').count() % 2 == 0;
            let ends_ok = match lhs.split_once(" -> ") {
                Some((a, b)) => id(a) && id(b),
                None => id(lhs),
            };
            balanced && ends_ok
        })
    }

    #[test]
    fn fft2_is_well_formed_dot() {
        let dot = export_dot(&generate_fft_sfg(2).unwrap());
        assert!(well_formed(&dot), "{dot}");
        assert!(well_formed(&export_dot(&parse_sfg(REFERENCE).unwrap())));
    }
}
