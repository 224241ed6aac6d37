//! IL1S and WS1S formulas and the formula-to-formula transformations.
//!
//! A single AST covers both logics: IL1S formulas are the ones without
//! set variables and without the constant `0`. Which successor is meant
//! (circular or looping) is decided by the evaluator, not by the tree.

mod eval;
mod system;
mod transform;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{all_structures, eval_ils, eval_wss, EvalError, Structure, Successor};
pub use system::{
    build_deadlock_formula, build_decomposability_formula, build_init_formula,
    build_size_formula, build_trap_constraint,
};
pub use transform::{dualize, flatten, is_flat, nnf, translate_tr, Gensym, TransformError};

/// Prefix reserved for generated identifiers. User identifiers may not use it.
pub const RESERVED_PREFIX: char = '_';

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermBase {
    Var(String),
    Const(String),
    /// The WS1S constant `0`.
    Zero,
}

/// `succ^succs(base)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub base: TermBase,
    pub succs: u32,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term { base: TermBase::Var(name.into()), succs: 0 }
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term { base: TermBase::Const(name.into()), succs: 0 }
    }

    pub fn zero() -> Term {
        Term { base: TermBase::Zero, succs: 0 }
    }

    pub fn succ(mut self) -> Term {
        self.succs += 1;
        self
    }

    pub fn succ_n(mut self, k: u32) -> Term {
        self.succs += k;
        self
    }

    pub fn var_name(&self) -> Option<&str> {
        match &self.base {
            TermBase::Var(v) => Some(v),
            _ => None,
        }
    }

    /// A bare variable, no successor applied.
    pub fn is_plain_var(&self) -> bool {
        self.succs == 0 && matches!(self.base, TermBase::Var(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Le(Term, Term),
    Lt(Term, Term),
    /// Monadic predicate atom `pr(t)` (ports and states).
    Pred(String, Term),
    /// Set-variable atom `t in X`.
    SetMem(String, Term),
    /// `mod(t, k, l)`: the value of `t` is congruent to `l` modulo `k`.
    Mod(Term, u32, u32),
    /// `inf(t)`, sugar for `forall y. t <= y`.
    Inf(Term),
    /// `sup(t)`, sugar for `forall y. y <= t`.
    Sup(Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

/// Free symbols of a formula, split by kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    pub vars: BTreeSet<String>,
    pub consts: BTreeSet<String>,
    pub preds: BTreeSet<String>,
    pub sets: BTreeSet<String>,
}

impl Formula {
    pub fn pred(name: impl Into<String>, t: Term) -> Formula {
        Formula::Pred(name.into(), t)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::Eq(a, b))
    }

    /// Conjunction; `true` for no operands, the operand itself for one.
    pub fn and(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    /// Disjunction; `false` for no operands, the operand itself for one.
    pub fn or(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::False,
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists_set(v: impl Into<String>, body: Formula) -> Formula {
        Formula::ExistsSet(v.into(), Box::new(body))
    }

    pub fn forall_set(v: impl Into<String>, body: Formula) -> Formula {
        Formula::ForallSet(v.into(), Box::new(body))
    }

    /// Terms of an atomic formula; empty for non-atoms.
    pub fn atom_terms(&self) -> Vec<&Term> {
        match self {
            Formula::Eq(a, b) | Formula::Le(a, b) | Formula::Lt(a, b) => vec![a, b],
            Formula::Pred(_, t)
            | Formula::SetMem(_, t)
            | Formula::Mod(t, _, _)
            | Formula::Inf(t)
            | Formula::Sup(t) => vec![t],
            _ => Vec::new(),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::True
                | Formula::False
                | Formula::Eq(..)
                | Formula::Le(..)
                | Formula::Lt(..)
                | Formula::Pred(..)
                | Formula::SetMem(..)
                | Formula::Mod(..)
                | Formula::Inf(_)
                | Formula::Sup(_)
        )
    }

    pub fn free_symbols(&self) -> Symbols {
        let mut out = Symbols::default();
        let mut bound_fo = Vec::new();
        let mut bound_so = Vec::new();
        collect_free(self, &mut bound_fo, &mut bound_so, &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.free_symbols().vars
    }

    pub fn is_sentence(&self) -> bool {
        let s = self.free_symbols();
        s.vars.is_empty() && s.consts.is_empty() && s.sets.is_empty()
    }

    /// True if no predicate atom occurs anywhere in the formula.
    pub fn is_predicate_free(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if matches!(f, Formula::Pred(..)) {
                found = true;
            }
        });
        !found
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a)
            | Formula::ExistsSet(_, a)
            | Formula::ForallSet(_, a) => a.visit(f),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.visit(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Every identifier occurring in the formula, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut names = BTreeSet::new();
        self.visit(&mut |f| {
            match f {
                Formula::Pred(p, _) => {
                    names.insert(p.clone());
                }
                Formula::SetMem(x, _)
                | Formula::Exists(x, _)
                | Formula::Forall(x, _)
                | Formula::ExistsSet(x, _)
                | Formula::ForallSet(x, _) => {
                    names.insert(x.clone());
                }
                _ => {}
            }
            if f.is_atom() {
                for t in f.atom_terms() {
                    match &t.base {
                        TermBase::Var(v) | TermBase::Const(v) => {
                            names.insert(v.clone());
                        }
                        TermBase::Zero => {}
                    }
                }
            }
        });
        names
    }

    /// Applies `f` to every term of every atom.
    pub fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Formula {
        self.map_atoms(&|atom| match atom {
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::Le(a, b) => Formula::Le(f(a), f(b)),
            Formula::Lt(a, b) => Formula::Lt(f(a), f(b)),
            Formula::Pred(p, t) => Formula::Pred(p.clone(), f(t)),
            Formula::SetMem(x, t) => Formula::SetMem(x.clone(), f(t)),
            Formula::Mod(t, k, l) => Formula::Mod(f(t), *k, *l),
            Formula::Inf(t) => Formula::Inf(f(t)),
            Formula::Sup(t) => Formula::Sup(f(t)),
            other => other.clone(),
        })
    }

    /// Rebuilds the formula, replacing every atom by `f(atom)`.
    pub fn map_atoms(&self, f: &impl Fn(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Not(a) => Formula::not(a.map_atoms(f)),
            Formula::And(xs) => Formula::And(xs.iter().map(|x| x.map_atoms(f)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|x| x.map_atoms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            Formula::Exists(v, a) => Formula::exists(v.clone(), a.map_atoms(f)),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.map_atoms(f)),
            Formula::ExistsSet(v, a) => Formula::exists_set(v.clone(), a.map_atoms(f)),
            Formula::ForallSet(v, a) => Formula::forall_set(v.clone(), a.map_atoms(f)),
            atom => f(atom),
        }
    }

    /// Replaces the constant `c` by the term `t` (capture is the caller's concern).
    pub fn substitute_const(&self, c: &str, t: &Term) -> Formula {
        self.map_terms(&|term| match &term.base {
            TermBase::Const(name) if name == c => t.clone().succ_n(term.succs),
            _ => term.clone(),
        })
    }

    /// Replaces free occurrences of variable `v` by the term `t`.
    pub fn substitute_var(&self, v: &str, t: &Term) -> Formula {
        match self {
            Formula::Exists(x, _) | Formula::Forall(x, _) if x == v => self.clone(),
            Formula::Not(a) => Formula::not(a.substitute_var(v, t)),
            Formula::And(xs) => Formula::And(xs.iter().map(|x| x.substitute_var(v, t)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|x| x.substitute_var(v, t)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute_var(v, t), b.substitute_var(v, t)),
            Formula::Iff(a, b) => Formula::iff(a.substitute_var(v, t), b.substitute_var(v, t)),
            Formula::Exists(x, a) => Formula::exists(x.clone(), a.substitute_var(v, t)),
            Formula::Forall(x, a) => Formula::forall(x.clone(), a.substitute_var(v, t)),
            Formula::ExistsSet(x, a) => Formula::exists_set(x.clone(), a.substitute_var(v, t)),
            Formula::ForallSet(x, a) => Formula::forall_set(x.clone(), a.substitute_var(v, t)),
            atom => atom.map_terms(&|term| match &term.base {
                TermBase::Var(name) if name == v => t.clone().succ_n(term.succs),
                _ => term.clone(),
            }),
        }
    }

    /// Renames predicate symbols through `f`.
    pub fn rename_preds(&self, f: &impl Fn(&str) -> String) -> Formula {
        self.map_atoms(&|atom| match atom {
            Formula::Pred(p, t) => Formula::Pred(f(p), t.clone()),
            other => other.clone(),
        })
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

fn collect_free(f: &Formula, bound_fo: &mut Vec<String>, bound_so: &mut Vec<String>, out: &mut Symbols) {
    let term = |t: &Term, bound_fo: &Vec<String>, out: &mut Symbols| match &t.base {
        TermBase::Var(v) => {
            if !bound_fo.contains(v) {
                out.vars.insert(v.clone());
            }
        }
        TermBase::Const(c) => {
            out.consts.insert(c.clone());
        }
        TermBase::Zero => {}
    };
    match f {
        Formula::True | Formula::False => {}
        Formula::Eq(a, b) | Formula::Le(a, b) | Formula::Lt(a, b) => {
            term(a, bound_fo, out);
            term(b, bound_fo, out);
        }
        Formula::Pred(p, t) => {
            out.preds.insert(p.clone());
            term(t, bound_fo, out);
        }
        Formula::SetMem(x, t) => {
            if !bound_so.contains(x) {
                out.sets.insert(x.clone());
            }
            term(t, bound_fo, out);
        }
        Formula::Mod(t, _, _) | Formula::Inf(t) | Formula::Sup(t) => term(t, bound_fo, out),
        Formula::Not(a) => collect_free(a, bound_fo, bound_so, out),
        Formula::And(xs) | Formula::Or(xs) => {
            for x in xs {
                collect_free(x, bound_fo, bound_so, out);
            }
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_free(a, bound_fo, bound_so, out);
            collect_free(b, bound_fo, bound_so, out);
        }
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            bound_fo.push(v.clone());
            collect_free(a, bound_fo, bound_so, out);
            bound_fo.pop();
        }
        Formula::ExistsSet(v, a) | Formula::ForallSet(v, a) => {
            bound_so.push(v.clone());
            collect_free(a, bound_fo, bound_so, out);
            bound_so.pop();
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.succs {
            f.write_str("succ(")?;
        }
        match &self.base {
            TermBase::Var(v) | TermBase::Const(v) => f.write_str(v)?,
            TermBase::Zero => f.write_str("0")?,
        }
        for _ in 0..self.succs {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::format_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_symbols_respect_binders() {
        // exists x. p(x) & x <= y & c = succ(x) & z in X
        let f = Formula::exists(
            "x",
            Formula::And(vec![
                Formula::pred("p", Term::var("x")),
                Formula::Le(Term::var("x"), Term::var("y")),
                Formula::Eq(Term::constant("c"), Term::var("x").succ()),
                Formula::SetMem("X".into(), Term::var("z")),
            ]),
        );
        let s = f.free_symbols();
        assert_eq!(s.vars.into_iter().collect::<Vec<_>>(), vec!["y", "z"]);
        assert_eq!(s.consts.into_iter().collect::<Vec<_>>(), vec!["c"]);
        assert_eq!(s.preds.into_iter().collect::<Vec<_>>(), vec!["p"]);
        assert_eq!(s.sets.into_iter().collect::<Vec<_>>(), vec!["X"]);
    }

    #[test]
    fn substitute_var_stops_at_binder() {
        let f = Formula::And(vec![
            Formula::pred("p", Term::var("x")),
            Formula::exists("x", Formula::pred("q", Term::var("x"))),
        ]);
        let g = f.substitute_var("x", &Term::var("y").succ());
        assert_eq!(
            g,
            Formula::And(vec![
                Formula::pred("p", Term::var("y").succ()),
                Formula::exists("x", Formula::pred("q", Term::var("x"))),
            ])
        );
    }

    #[test]
    fn smart_constructors_collapse() {
        assert_eq!(Formula::and(vec![]), Formula::True);
        assert_eq!(Formula::or(vec![]), Formula::False);
        let p = Formula::pred("p", Term::var("x"));
        assert_eq!(Formula::and(vec![p.clone()]), p);
    }
}
