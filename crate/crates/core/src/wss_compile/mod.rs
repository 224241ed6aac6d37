//! WS1S formulas to automata and back.
//!
//! Words are read as finite structures whose universe is the set of word
//! positions (no padding), so the empty word is never accepted.

mod positive;
mod prim;

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::automata::{
    combine, complement, extend, minimize, product, project_track, AutomataError, Track, TrackNfa,
};
use crate::logic::{flatten, Formula, Gensym, Term, TermBase};

pub use positive::positive_formula_of;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("mod({0}, {1}) needs 0 <= {1} < {0}")]
    BadModulus(u32, u32),
    #[error("positive formula needs an automaton over predicate tracks only, found `{0}`")]
    NotPredicateOnly(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    /// Intermediate results above this many states are minimized.
    pub minimize_threshold: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { minimize_threshold: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceEntry {
    pub node: String,
    pub states_before: usize,
    pub transitions_before: usize,
    pub states_after: usize,
    pub transitions_after: usize,
    pub cached: bool,
    pub elapsed_micros: u128,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CompilationTrace {
    pub entries: Vec<TraceEntry>,
}

impl CompilationTrace {
    pub fn max_states(&self) -> usize {
        self.entries.iter().map(|e| e.states_before.max(e.states_after)).max().unwrap_or(0)
    }
}

/// Automaton of `phi` over its free symbols.
pub fn compile(phi: &Formula) -> Result<TrackNfa, CompileError> {
    compile_with(phi, CompileOptions::default()).map(|(a, _)| a)
}

pub fn compile_with(phi: &Formula, opts: CompileOptions) -> Result<(TrackNfa, CompilationTrace), CompileError> {
    // Constants are free first-order tracks under their own name.
    let phi = phi.map_terms(&|t| match &t.base {
        TermBase::Const(c) => Term { base: TermBase::Var(c.clone()), succs: t.succs },
        _ => t.clone(),
    });
    let flat = flatten(&phi);
    let mut c = Compiler {
        opts,
        memo: HashMap::new(),
        trace: CompilationTrace::default(),
        start: Instant::now(),
        gensym: Gensym::for_formula(&flat),
    };
    let a = c.formula(&flat)?;
    let a = minimize(&a);
    Ok((a, c.trace))
}

struct Compiler {
    opts: CompileOptions,
    memo: HashMap<Formula, TrackNfa>,
    trace: CompilationTrace,
    start: Instant,
    gensym: Gensym,
}

fn node_label(f: &Formula) -> String {
    let kind = match f {
        Formula::True => "true",
        Formula::False => "false",
        Formula::Eq(..) => "eq",
        Formula::Le(..) => "le",
        Formula::Lt(..) => "lt",
        Formula::Pred(..) => "pred",
        Formula::SetMem(..) => "in",
        Formula::Mod(..) => "mod",
        Formula::Inf(_) => "inf",
        Formula::Sup(_) => "sup",
        Formula::Not(_) => "not",
        Formula::And(_) => "and",
        Formula::Or(_) => "or",
        Formula::Implies(..) => "implies",
        Formula::Iff(..) => "iff",
        Formula::Exists(v, _) => return format!("exists {v}"),
        Formula::Forall(v, _) => return format!("forall {v}"),
        Formula::ExistsSet(v, _) => return format!("exists set {v}"),
        Formula::ForallSet(v, _) => return format!("forall set {v}"),
    };
    if f.is_atom() {
        f.to_string()
    } else {
        kind.to_string()
    }
}

/// Brings `a` and `b` onto the union of their registries.
fn align(a: &TrackNfa, b: &TrackNfa) -> Result<(TrackNfa, TrackNfa), AutomataError> {
    if a.registry() == b.registry() {
        return Ok((a.clone(), b.clone()));
    }
    let reg = a.registry().union(b.registry())?;
    Ok((extend(a, &reg)?, extend(b, &reg)?))
}

impl Compiler {
    fn record(&mut self, f: &Formula, before: &TrackNfa, after: &TrackNfa, cached: bool) {
        self.trace.entries.push(TraceEntry {
            node: node_label(f),
            states_before: before.num_states(),
            transitions_before: before.num_transitions(),
            states_after: after.num_states(),
            transitions_after: after.num_transitions(),
            cached,
            elapsed_micros: self.start.elapsed().as_micros(),
        });
    }

    fn shrink(&self, a: TrackNfa) -> TrackNfa {
        if a.num_states() > self.opts.minimize_threshold {
            minimize(&a)
        } else {
            a
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<TrackNfa, CompileError> {
        if let Some(a) = self.memo.get(f) {
            let a = a.clone();
            self.record(f, &a, &a, true);
            return Ok(a);
        }
        let raw = self.uncached(f)?;
        let out = match f {
            // projections always end minimized; the rest only when large
            Formula::Exists(..) | Formula::Forall(..) | Formula::ExistsSet(..) | Formula::ForallSet(..) => {
                minimize(&raw)
            }
            _ => self.shrink(raw.clone()),
        };
        self.record(f, &raw, &out, false);
        self.memo.insert(f.clone(), out.clone());
        Ok(out)
    }

    /// Restricts to words where every first-order track holds exactly one 1.
    fn valid(&self, a: &TrackNfa) -> Result<TrackNfa, CompileError> {
        let v = prim::valid(a.registry());
        Ok(product(a, &v)?)
    }

    fn negate(&mut self, a: &TrackNfa) -> Result<TrackNfa, CompileError> {
        self.valid(&complement(a))
    }

    fn binary(&mut self, a: &Formula, b: &Formula, op: fn(bool, bool) -> bool) -> Result<TrackNfa, CompileError> {
        let x = self.formula(a)?;
        let y = self.formula(b)?;
        let (x, y) = align(&x, &y)?;
        let c = combine(&x, &y, op)?;
        self.valid(&c)
    }

    fn uncached(&mut self, f: &Formula) -> Result<TrackNfa, CompileError> {
        match f {
            Formula::Not(a) => {
                let x = self.formula(a)?;
                self.negate(&x)
            }
            Formula::And(xs) => {
                let mut acc = prim::truth();
                for x in xs {
                    let y = self.formula(x)?;
                    let (l, r) = align(&acc, &y)?;
                    acc = self.shrink(product(&l, &r)?);
                }
                Ok(acc)
            }
            Formula::Or(xs) => {
                let mut acc = prim::falsity();
                for x in xs {
                    let y = self.formula(x)?;
                    let (l, r) = align(&acc, &y)?;
                    acc = self.shrink(self.valid(&combine(&l, &r, |p, q| p || q)?)?);
                }
                Ok(acc)
            }
            Formula::Implies(a, b) => self.binary(a, b, |p, q| !p || q),
            Formula::Iff(a, b) => self.binary(a, b, |p, q| p == q),
            Formula::Exists(v, a) => {
                let x = self.formula(a)?;
                self.project(x, v)
            }
            Formula::ExistsSet(v, a) => {
                let x = self.formula(a)?;
                self.project(x, v)
            }
            Formula::Forall(v, a) | Formula::ForallSet(v, a) => {
                let x = self.formula(a)?;
                let nx = self.negate(&x)?;
                let p = self.project(minimize(&nx), v)?;
                self.negate(&minimize(&p))
            }
            atom => self.atom(atom),
        }
    }

    fn project(&mut self, a: TrackNfa, v: &str) -> Result<TrackNfa, CompileError> {
        if a.registry().index_of(v).is_none() {
            return Ok(a);
        }
        Ok(project_track(&a, v)?)
    }

    /// Names a term by a track: plain variables are their own track,
    /// `0` gets a fresh track constrained to the first position.
    fn term_track(&mut self, t: &Term, defs: &mut Vec<(String, TrackNfa)>) -> String {
        match &t.base {
            TermBase::Var(v) | TermBase::Const(v) => v.clone(),
            TermBase::Zero => {
                let z = self.gensym.fresh("z");
                defs.push((z.clone(), prim::first(&z)));
                z
            }
        }
    }

    fn atom(&mut self, f: &Formula) -> Result<TrackNfa, CompileError> {
        let mut defs = Vec::new();
        let core = match f {
            Formula::True => prim::truth(),
            Formula::False => prim::falsity(),
            Formula::Eq(a, b) => {
                // after flattening at most one side carries one successor
                let (a, b) = if b.succs > 0 { (b, a) } else { (a, b) };
                let x = self.term_track(a, &mut defs);
                let y = self.term_track(b, &mut defs);
                match a.succs {
                    0 => prim::eq(&x, &y),
                    1 => prim::succ(&x, &y),
                    _ => unreachable!("flattened formula has nested successors"),
                }
            }
            Formula::Le(a, b) => {
                let x = self.term_track(a, &mut defs);
                let y = self.term_track(b, &mut defs);
                prim::le(&x, &y, false)
            }
            Formula::Lt(a, b) => {
                let x = self.term_track(a, &mut defs);
                let y = self.term_track(b, &mut defs);
                prim::le(&x, &y, true)
            }
            Formula::Pred(p, t) => {
                let x = self.term_track(t, &mut defs);
                prim::member(Track::pred(p.clone()), &x)?
            }
            Formula::SetMem(s, t) => {
                let x = self.term_track(t, &mut defs);
                prim::member(Track::set(s.clone()), &x)?
            }
            Formula::Mod(t, k, l) => {
                if *k == 0 || l >= k {
                    return Err(CompileError::BadModulus(*k, *l));
                }
                let x = self.term_track(t, &mut defs);
                prim::modulo(&x, *k, *l)
            }
            Formula::Inf(t) => {
                let x = self.term_track(t, &mut defs);
                prim::first(&x)
            }
            Formula::Sup(t) => {
                let x = self.term_track(t, &mut defs);
                prim::last(&x)
            }
            other => unreachable!("not an atom: {other:?}"),
        };
        let mut acc = core;
        for (z, d) in defs {
            let (l, r) = align(&acc, &d)?;
            acc = project_track(&product(&l, &r)?, &z)?;
        }
        Ok(acc)
    }
}
