use std::fmt::Write;

use crate::logic::Formula;
use crate::model::{PropertyKind, SystemModel};

const P_QUANT: u8 = 0;
const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_NOT: u8 = 5;
const P_ATOM: u8 = 6;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) | Formula::ExistsSet(..) | Formula::ForallSet(..) => P_QUANT,
        Formula::Iff(..) => P_IFF,
        Formula::Implies(..) => P_IMP,
        Formula::Or(xs) if xs.len() > 1 => P_OR,
        Formula::And(xs) if xs.len() > 1 => P_AND,
        Formula::Not(a) if matches!(a.as_ref(), Formula::Eq(..)) => P_ATOM,
        Formula::Not(_) => P_NOT,
        _ => P_ATOM,
    }
}

/// Canonical text of a formula; parses back to the same tree.
pub fn format_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn child(f: &Formula, min: u8, out: &mut String) {
    if prec(f) < min {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Eq(a, b) => write!(out, "{a} = {b}").unwrap(),
        Formula::Le(a, b) => write!(out, "{a} <= {b}").unwrap(),
        Formula::Lt(a, b) => write!(out, "{a} < {b}").unwrap(),
        Formula::Pred(p, t) => write!(out, "{p}({t})").unwrap(),
        Formula::SetMem(x, t) => write!(out, "{t} in {x}").unwrap(),
        Formula::Mod(t, k, l) => write!(out, "mod({t}, {k}, {l})").unwrap(),
        Formula::Inf(t) => write!(out, "inf({t})").unwrap(),
        Formula::Sup(t) => write!(out, "sup({t})").unwrap(),
        Formula::Not(a) => match a.as_ref() {
            Formula::Eq(x, y) => write!(out, "{x} != {y}").unwrap(),
            inner => {
                out.push('!');
                child(inner, P_NOT, out);
            }
        },
        Formula::And(xs) | Formula::Or(xs) if xs.is_empty() => {
            out.push_str(if matches!(f, Formula::And(_)) { "true" } else { "false" })
        }
        Formula::And(xs) | Formula::Or(xs) if xs.len() == 1 => {
            // a unary connective has no surface syntax; keep the operand grouped
            out.push('(');
            write_formula(&xs[0], out);
            out.push(')');
        }
        Formula::And(xs) => join(xs, " & ", P_AND + 1, out),
        Formula::Or(xs) => join(xs, " | ", P_OR + 1, out),
        Formula::Implies(a, b) => {
            child(a, P_IMP + 1, out);
            out.push_str(" -> ");
            child(b, P_IMP, out);
        }
        Formula::Iff(a, b) => {
            child(a, P_IFF + 1, out);
            out.push_str(" <-> ");
            child(b, P_IFF + 1, out);
        }
        Formula::Exists(v, a) => quant("exists ", v, a, out),
        Formula::Forall(v, a) => quant("forall ", v, a, out),
        Formula::ExistsSet(v, a) => quant("exists set ", v, a, out),
        Formula::ForallSet(v, a) => quant("forall set ", v, a, out),
    }
}

fn join(xs: &[Formula], sep: &str, min: u8, out: &mut String) {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        child(x, min, out);
    }
}

fn quant(kw: &str, v: &str, body: &Formula, out: &mut String) {
    out.push_str(kw);
    out.push_str(v);
    out.push_str(". ");
    write_formula(body, out);
}

/// Canonical text of a model.
pub fn pretty_print(model: &SystemModel) -> String {
    let mut out = String::new();
    for c in &model.components {
        writeln!(out, "component {} {{", c.name).unwrap();
        writeln!(out, "  states {} init {};", c.states.join(", "), c.initial).unwrap();
        for p in &c.ports {
            match &p.rule {
                Some((s, t)) => writeln!(out, "  port {}: {s} -> {t};", p.name).unwrap(),
                None => writeln!(out, "  port {};", p.name).unwrap(),
            }
        }
        out.push_str("}\n\n");
    }
    writeln!(out, "interaction {};", format_formula(&model.interaction)).unwrap();
    for p in &model.properties {
        match &p.kind {
            PropertyKind::Deadlock => out.push_str("property deadlock;\n"),
            PropertyKind::BadStates(f) => {
                writeln!(out, "property bad \"{}\": {};", p.name, format_formula(f)).unwrap()
            }
        }
    }
    for w in &model.windows {
        let consts: Vec<String> = w.constants.iter().map(|(c, t)| format!("{c}: {t}")).collect();
        writeln!(out, "window \"{}\" ({}) where {};", w.name, consts.join(", "), format_formula(&w.constraint)).unwrap();
    }
    out
}
