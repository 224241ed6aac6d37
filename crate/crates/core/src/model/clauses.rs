//! Splitting an interaction formula into rendez-vous/broadcast clauses.
//!
//! A clause is `exists x1..xl. guard & p1(t1) & .. & pl(tl) & (forall y. psi -> q(y)) & ..`
//! where the guard is predicate-free. Existentials are pushed through
//! disjunctions and conjunctions are multiplied out.

use thiserror::Error;

use crate::logic::{Formula, Gensym, Term, TermBase};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortAtom {
    pub port: String,
    pub term: Term,
}

/// `forall var. guard -> port(var)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Broadcast {
    pub var: String,
    pub guard: Formula,
    pub port: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Clause {
    /// Existentially bound variables, outermost first.
    pub vars: Vec<String>,
    /// Predicate-free conjuncts.
    pub guards: Vec<Formula>,
    pub ports: Vec<PortAtom>,
    pub broadcasts: Vec<Broadcast>,
}

impl Clause {
    pub fn guard(&self) -> Formula {
        Formula::and(self.guards.clone())
    }

    /// The clause as a formula again.
    pub fn to_formula(&self) -> Formula {
        let mut parts = self.guards.clone();
        parts.extend(self.ports.iter().map(|a| Formula::Pred(a.port.clone(), a.term.clone())));
        parts.extend(self.broadcasts.iter().map(|b| {
            Formula::forall(
                b.var.clone(),
                Formula::implies(b.guard.clone(), Formula::pred(b.port.clone(), Term::var(b.var.clone()))),
            )
        }));
        let mut f = Formula::and(parts);
        for v in self.vars.iter().rev() {
            f = Formula::exists(v.clone(), f);
        }
        f
    }

    fn rename(&self, old: &str, new: &str) -> Clause {
        let t = Term::var(new);
        Clause {
            vars: self.vars.iter().map(|v| if v == old { new.to_string() } else { v.clone() }).collect(),
            guards: self.guards.iter().map(|g| g.substitute_var(old, &t)).collect(),
            ports: self
                .ports
                .iter()
                .map(|a| PortAtom {
                    port: a.port.clone(),
                    term: match &a.term.base {
                        TermBase::Var(v) if v == old => t.clone().succ_n(a.term.succs),
                        _ => a.term.clone(),
                    },
                })
                .collect(),
            broadcasts: self
                .broadcasts
                .iter()
                .map(|b| Broadcast {
                    var: b.var.clone(),
                    guard: if b.var == old { b.guard.clone() } else { b.guard.substitute_var(old, &t) },
                    port: b.port.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("predicate `{0}` is not a port")]
    NonPortPredicate(String),
    #[error("subformula `{0}` is outside the clause shape (exists-prefix, guard, port atoms, broadcasts)")]
    Unsupported(String),
}

/// Decomposes an interaction formula into clauses. `is_port` tells port
/// predicates apart from everything else.
pub fn decompose(f: &Formula, is_port: &dyn Fn(&str) -> bool) -> Result<Vec<Clause>, ShapeError> {
    let mut gen = Gensym::for_formula(f);
    decompose_rec(f, is_port, &mut gen)
}

fn decompose_rec(f: &Formula, is_port: &dyn Fn(&str) -> bool, gen: &mut Gensym) -> Result<Vec<Clause>, ShapeError> {
    if f.is_predicate_free() {
        return Ok(match f {
            Formula::True => vec![Clause::default()],
            Formula::False => vec![],
            g => vec![Clause { guards: vec![g.clone()], ..Clause::default() }],
        });
    }
    match f {
        Formula::Pred(p, t) => {
            if !is_port(p) {
                return Err(ShapeError::NonPortPredicate(p.clone()));
            }
            Ok(vec![Clause { ports: vec![PortAtom { port: p.clone(), term: t.clone() }], ..Clause::default() }])
        }
        Formula::Or(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(decompose_rec(x, is_port, gen)?);
            }
            Ok(out)
        }
        Formula::And(xs) => {
            let mut acc = vec![Clause::default()];
            for x in xs {
                let part = decompose_rec(x, is_port, gen)?;
                let mut next = Vec::new();
                for a in &acc {
                    for b in &part {
                        next.push(merge(a, b, gen));
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
        Formula::Exists(v, body) => {
            let mut out = decompose_rec(body, is_port, gen)?;
            for c in &mut out {
                c.vars.insert(0, v.clone());
            }
            Ok(out)
        }
        Formula::Forall(y, body) => {
            let (guard, atom) = match body.as_ref() {
                Formula::Implies(g, a) => (g.as_ref().clone(), a.as_ref()),
                a => (Formula::True, a),
            };
            match atom {
                Formula::Pred(p, t) if guard.is_predicate_free() && t.succs == 0 && t.var_name() == Some(y) => {
                    if !is_port(p) {
                        return Err(ShapeError::NonPortPredicate(p.clone()));
                    }
                    Ok(vec![Clause {
                        broadcasts: vec![Broadcast { var: y.clone(), guard, port: p.clone() }],
                        ..Clause::default()
                    }])
                }
                _ => Err(ShapeError::Unsupported(f.to_string())),
            }
        }
        _ => Err(ShapeError::Unsupported(f.to_string())),
    }
}

fn clause_names(c: &Clause) -> Vec<String> {
    let mut names: Vec<String> = c.vars.clone();
    for g in &c.guards {
        names.extend(g.free_vars());
    }
    for a in &c.ports {
        if let Some(v) = a.term.var_name() {
            names.push(v.to_string());
        }
    }
    for b in &c.broadcasts {
        names.push(b.var.clone());
        names.extend(b.guard.free_vars());
    }
    names
}

fn merge(a: &Clause, b: &Clause, gen: &mut Gensym) -> Clause {
    let taken = clause_names(a);
    let mut b = b.clone();
    for v in b.vars.clone() {
        if taken.contains(&v) {
            let fresh = gen.fresh(&v);
            b = b.rename(&v, &fresh);
        }
    }
    Clause {
        vars: a.vars.iter().chain(&b.vars).cloned().collect(),
        guards: a.guards.iter().chain(&b.guards).cloned().collect(),
        ports: a.ports.iter().chain(&b.ports).cloned().collect(),
        broadcasts: a.broadcasts.iter().chain(&b.broadcasts).cloned().collect(),
    }
}
