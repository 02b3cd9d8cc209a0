//! Graphviz export.

use std::fmt::Write;

use crate::graph::LabelledGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT text; edge labels use the monoid text form.
pub fn to_dot(g: &LabelledGraph) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.vertices() {
        writeln!(out, "  {};", quote(v)).unwrap();
    }
    for e in g.edges() {
        writeln!(
            out,
            "  {} -- {} [id={}, label={}];",
            quote(&e.ends[0]),
            quote(&e.ends[1]),
            quote(&e.id),
            quote(&e.label.to_string())
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::monoid::{MonoidElement, PrimeAlphabet};

    #[test]
    fn renders_loops_and_escapes() {
        let a = PrimeAlphabet::new(["u", "v"]).unwrap();
        let g = LabelledGraph::new(
            a.clone(),
            vec!["A".into(), "B\"".into()],
            vec![
                Edge::new(
                    "e1",
                    "A",
                    "B\"",
                    MonoidElement::parse_text(&a, "u*v^2").unwrap(),
                ),
                Edge::new("l", "A", "A", MonoidElement::parse_text(&a, "u").unwrap()),
            ],
        );
        assert_eq!(
            to_dot(&g),
            "graph G {\n  \"A\";\n  \"B\\\"\";\n  \"A\" -- \"B\\\"\" [id=\"e1\", label=\"u*v^2\"];\n  \"A\" -- \"A\" [id=\"l\", label=\"u\"];\n}\n"
        );
    }
}
