use std::fmt::Write;

use super::MarkedPetriNet;

impl MarkedPetriNet {
    /// Graphviz rendering: places as circles (filled when initially
    /// marked), transitions as boxes labeled with their port atoms.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "\\\""));
        for p in 0..self.places.len() {
            let style = if self.initial.get(p) { ", style=filled, fillcolor=gray" } else { "" };
            let _ = writeln!(out, "  p{p} [shape=circle, label=\"{}\"{style}];", self.place_name(p));
        }
        for (i, t) in self.transitions.iter().enumerate() {
            let _ = writeln!(out, "  t{i} [shape=box, label=\"{}\"];", t.label);
            for &p in &t.pre {
                let _ = writeln!(out, "  p{p} -> t{i};");
            }
            for &p in &t.post {
                let _ = writeln!(out, "  t{i} -> p{p};");
            }
        }
        out.push_str("}\n");
        out
    }
}
