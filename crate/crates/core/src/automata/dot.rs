use std::collections::BTreeMap;
use std::fmt::Write;

use super::TrackNfa;

impl TrackNfa {
    /// Graphviz rendering. Edge labels list one cube per line, one character
    /// per track in registry order.
    pub fn to_dot(&self, name: &str) -> String {
        let w = self.registry().width();
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "\\\""));
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(out, "  label=\"{}\";", self.registry().names().join(" "));
        let _ = writeln!(out, "  node [shape=circle];");
        for s in 0..self.num_states() as u32 {
            let shape = if self.is_final(s) { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{s} [shape={shape}];");
        }
        for &s in self.initial() {
            let _ = writeln!(out, "  init{s} [shape=point];");
            let _ = writeln!(out, "  init{s} -> q{s};");
        }
        let mut grouped: BTreeMap<(u32, u32), Vec<String>> = BTreeMap::new();
        for (s, c, t) in self.transitions() {
            grouped.entry((s, t)).or_default().push(c.render(w));
        }
        for ((s, t), labels) in grouped {
            let _ = writeln!(out, "  q{s} -> q{t} [label=\"{}\"];", labels.join("\\n"));
        }
        out.push_str("}\n");
        out
    }
}
