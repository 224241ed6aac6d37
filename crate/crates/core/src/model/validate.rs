use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{Diagnostic, SourceSpan};
use crate::logic::{Formula, Term, TermBase, RESERVED_PREFIX};

use super::{decompose, Clause, PropertyKind, ShapeError, SystemModel};

/// Checks the well-formedness restrictions. Returns one diagnostic per
/// violation, in a deterministic order; empty iff the model is valid.
pub fn validate_system(model: &SystemModel) -> Vec<Diagnostic> {
    let mut v = Validator { model, out: Vec::new() };
    v.components();
    v.interaction();
    v.properties();
    v.windows();
    v.out
}

struct Validator<'a> {
    model: &'a SystemModel,
    out: Vec<Diagnostic>,
}

fn reserved(name: &str) -> bool {
    name.starts_with(RESERVED_PREFIX)
}

impl Validator<'_> {
    fn error(&mut self, rule: &str, message: String, span: Option<SourceSpan>) {
        self.out.push(Diagnostic::error(rule, message, span));
    }

    fn comp_span(&self, name: &str) -> Option<SourceSpan> {
        self.model.spans.components.get(name).cloned()
    }

    fn port_span(&self, ty: &str, port: &str) -> Option<SourceSpan> {
        self.model.spans.ports.get(&(ty.to_string(), port.to_string())).cloned()
    }

    fn components(&mut self) {
        let m = self.model;
        if m.components.is_empty() {
            self.error("no component types", "the model declares no component type".into(), None);
        }
        let mut seen_types = BTreeSet::new();
        let mut port_owner: BTreeMap<&str, &str> = BTreeMap::new();
        for c in &m.components {
            let span = self.comp_span(&c.name);
            if !seen_types.insert(c.name.as_str()) {
                self.error("duplicate component type", format!("component type `{}` declared twice", c.name), span.clone());
            }
            if reserved(&c.name) {
                self.error("reserved identifier", format!("`{}` uses the reserved prefix `_`", c.name), span.clone());
            }
            let mut states = BTreeSet::new();
            for s in &c.states {
                if !states.insert(s.as_str()) {
                    self.error("duplicate state", format!("state `{s}` declared twice in `{}`", c.name), span.clone());
                }
                if reserved(s) {
                    self.error("reserved identifier", format!("`{s}` uses the reserved prefix `_`"), span.clone());
                }
            }
            if !states.contains(c.initial.as_str()) {
                self.error(
                    "unknown initial state",
                    format!("initial state `{}` of `{}` is not among its states", c.initial, c.name),
                    span.clone(),
                );
            }
            let mut ports = BTreeSet::new();
            for p in &c.ports {
                let pspan = self.port_span(&c.name, &p.name).or_else(|| span.clone());
                if !ports.insert(p.name.as_str()) {
                    self.error(
                        "duplicate port transition",
                        format!("port `{}` labels more than one transition of `{}`", p.name, c.name),
                        pspan.clone(),
                    );
                    continue;
                }
                if reserved(&p.name) {
                    self.error("reserved identifier", format!("`{}` uses the reserved prefix `_`", p.name), pspan.clone());
                }
                if let Some(other) = port_owner.insert(&p.name, &c.name) {
                    self.error(
                        "port name clash",
                        format!("port `{}` is declared by both `{other}` and `{}`", p.name, c.name),
                        pspan.clone(),
                    );
                }
                match &p.rule {
                    Some((s, t)) => {
                        for st in [s, t] {
                            if !states.contains(st.as_str()) {
                                self.error(
                                    "unknown state",
                                    format!("transition on `{}` uses unknown state `{st}` of `{}`", p.name, c.name),
                                    pspan.clone(),
                                );
                            }
                        }
                    }
                    None => self.out.push(Diagnostic::warning(
                        "port without transition",
                        format!("port `{}` has no transition; its pre/post atoms are false", p.name),
                        pspan,
                    )),
                }
            }
        }
    }

    fn check_reserved_names(&mut self, f: &Formula, span: &Option<SourceSpan>, what: &str) {
        for name in f.all_names() {
            if reserved(&name) {
                self.error("reserved identifier", format!("`{name}` in {what} uses the reserved prefix `_`"), span.clone());
            }
        }
    }

    fn interaction(&mut self) {
        let m = self.model;
        let span = m.spans.interaction.clone();
        let gamma = &m.interaction;
        self.check_reserved_names(gamma, &span, "the interaction");
        let free = gamma.free_symbols();
        for v in free.vars.iter().chain(&free.consts) {
            self.error("free symbol in interaction", format!("`{v}` is not bound in the interaction formula"), span.clone());
        }
        if !free.sets.is_empty() || contains_zero(gamma) {
            self.error("not an IL1S formula", "the interaction may not use set variables or `0`".into(), span.clone());
        }
        for p in &free.preds {
            if !m.is_port(p) {
                let rule = if m.is_state_pred(p) { "state predicate in interaction" } else { "unknown port" };
                self.error(rule, format!("`{p}` is not a port"), span.clone());
            }
        }
        gamma.visit(&mut |f| {
            if let Formula::Eq(a, b) | Formula::Le(a, b) | Formula::Lt(a, b) = f {
                if let (TermBase::Var(x), TermBase::Var(y)) = (&a.base, &b.base) {
                    if x == y {
                        self.out.push(Diagnostic::error(
                            "same-variable comparison",
                            format!("atom `{f}` compares two terms over the same variable `{x}`"),
                            span.clone(),
                        ));
                    }
                }
            }
        });
        if free.preds.iter().any(|p| !m.is_port(p)) {
            return;
        }
        match decompose(gamma, &|p| m.is_port(p)) {
            Ok(clauses) => {
                for c in &clauses {
                    self.clause(c, &span);
                }
            }
            Err(ShapeError::NonPortPredicate(_)) => {}
            Err(e) => self.error("interaction shape", e.to_string(), span),
        }
    }

    fn clause(&mut self, c: &Clause, span: &Option<SourceSpan>) {
        let m = self.model;
        let owner = |p: &str| m.port_owner(p).map(|c| c.name.clone()).unwrap_or_default();
        let mut by_type: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
        for a in &c.ports {
            by_type.entry(owner(&a.port)).or_default().insert(&a.port);
        }
        for (ty, ports) in &by_type {
            if ports.len() > 1 {
                let list: Vec<&str> = ports.iter().copied().collect();
                self.error(
                    "two ports of one component type in one clause",
                    format!("ports {} of `{ty}` occur in the same clause", list.join(", ")),
                    span.clone(),
                );
            }
        }
        let mut broadcast_types = BTreeMap::new();
        for b in &c.broadcasts {
            let ty = owner(&b.port);
            if let Some(prev) = broadcast_types.insert(ty.clone(), b.port.clone()) {
                if prev != b.port {
                    self.error(
                        "two ports of one component type in one clause",
                        format!("broadcast ports {prev}, {} of `{ty}` occur in the same clause", b.port),
                        span.clone(),
                    );
                }
            }
            // A broadcast over a type that also takes part by rendez-vous must
            // exclude the rendez-vous participants explicitly.
            for a in &c.ports {
                if owner(&a.port) == ty && a.port != b.port && !separates(&b.guard, &b.var, &a.term) {
                    self.error(
                        "two ports of one component type in one clause",
                        format!(
                            "broadcast `{}` may select the same `{ty}` instance as rendez-vous port `{}`; add `{} != {}` to its guard",
                            b.port, a.port, b.var, a.term
                        ),
                        span.clone(),
                    );
                }
            }
        }
        for a in &c.ports {
            if let Some(v) = a.term.var_name() {
                if !c.vars.iter().any(|x| x == v) {
                    self.error("free symbol in interaction", format!("port term `{}` is not bound by the clause", a.term), span.clone());
                }
            }
        }
    }

    fn properties(&mut self) {
        let m = self.model;
        let mut names = BTreeSet::new();
        for (i, p) in m.properties.iter().enumerate() {
            let span = m.spans.properties.get(i).cloned();
            if !names.insert(p.name.as_str()) {
                self.error("duplicate property", format!("property `{}` declared twice", p.name), span.clone());
            }
            let PropertyKind::BadStates(f) = &p.kind else { continue };
            self.check_reserved_names(f, &span, "a property");
            let free = f.free_symbols();
            for pred in &free.preds {
                if m.is_port(pred) {
                    self.error("property mentions port", format!("property `{}` mentions port `{pred}`", p.name), span.clone());
                } else if !m.is_state_pred(pred) {
                    self.error("unknown predicate", format!("property `{}` mentions unknown predicate `{pred}`", p.name), span.clone());
                }
            }
            if !free.vars.is_empty() || !free.consts.is_empty() || !free.sets.is_empty() || contains_zero(f) {
                self.error(
                    "free symbol in property",
                    format!("property `{}` must be an IL1S sentence", p.name),
                    span.clone(),
                );
            }
        }
    }

    fn windows(&mut self) {
        let m = self.model;
        let mut names = BTreeSet::new();
        for (i, w) in m.windows.iter().enumerate() {
            let span = m.spans.windows.get(i).cloned();
            if !names.insert(w.name.as_str()) {
                self.error("duplicate window", format!("window `{}` declared twice", w.name), span.clone());
            }
            self.check_reserved_names(&w.constraint, &span, "a window");
            let mut consts = BTreeSet::new();
            for (c, ty) in &w.constants {
                if !consts.insert(c.as_str()) {
                    self.error("duplicate window constant", format!("constant `{c}` declared twice in `{}`", w.name), span.clone());
                }
                if m.component(ty).is_none() {
                    self.error("unknown component type", format!("window `{}` uses unknown type `{ty}`", w.name), span.clone());
                }
            }
            let free = w.constraint.free_symbols();
            if !free.preds.is_empty() {
                self.error("predicate in window", format!("window `{}` may only use order and successor atoms", w.name), span.clone());
            }
            for c in &free.consts {
                if !consts.contains(c.as_str()) {
                    self.error("undeclared window constant", format!("`{c}` is not a constant of window `{}`", w.name), span.clone());
                }
            }
            if !free.vars.is_empty() || !free.sets.is_empty() || contains_zero(&w.constraint) {
                self.error("free symbol in window", format!("window `{}` has unbound variables", w.name), span.clone());
            }
        }
    }
}

fn contains_zero(f: &Formula) -> bool {
    let mut found = false;
    f.visit(&mut |g| {
        if g.is_atom() && g.atom_terms().iter().any(|t| t.base == TermBase::Zero) {
            found = true;
        }
    });
    found
}

/// True if `guard` has a top-level conjunct forcing `var` to differ from `t`.
fn separates(guard: &Formula, var: &str, t: &Term) -> bool {
    let conjuncts: Vec<&Formula> = match guard {
        Formula::And(xs) => xs.iter().collect(),
        g => vec![g],
    };
    let y = Term::var(var);
    conjuncts.iter().any(|c| match c {
        Formula::Not(inner) => matches!(inner.as_ref(), Formula::Eq(a, b) if (a == &y && b == t) || (a == t && b == &y)),
        Formula::Lt(a, b) => (a == &y && b == t) || (a == t && b == &y),
        _ => false,
    })
}
