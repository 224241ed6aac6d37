use std::collections::BTreeMap;

use thiserror::Error;

use super::{Formula, Symbols, Term, TermBase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("uninterpreted symbol `{0}`")]
    Unbound(String),
    #[error("universe size {0} outside 1..=64")]
    BadUniverse(usize),
    #[error("mod atom with k = 0 or l >= k")]
    BadModulus,
}

/// How `succ` behaves on the greatest element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Successor {
    /// IL1S: `(x + 1) mod n`.
    Circular,
    /// WS1S: `succ(n - 1) = n - 1`.
    Looping,
}

/// A finite structure over `[n]`. Subsets of `[n]` are bit masks.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Structure {
    pub n: usize,
    pub preds: BTreeMap<String, u64>,
    pub consts: BTreeMap<String, usize>,
    pub vars: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, u64>,
}

impl Structure {
    pub fn new(n: usize) -> Structure {
        Structure { n, ..Structure::default() }
    }

    pub fn with_pred(mut self, name: &str, members: impl IntoIterator<Item = usize>) -> Structure {
        let mask = members.into_iter().fold(0u64, |m, i| m | (1 << i));
        self.preds.insert(name.to_string(), mask);
        self
    }

    pub fn with_var(mut self, name: &str, value: usize) -> Structure {
        self.vars.insert(name.to_string(), value);
        self
    }

    pub fn with_const(mut self, name: &str, value: usize) -> Structure {
        self.consts.insert(name.to_string(), value);
        self
    }

    pub fn with_set(mut self, name: &str, members: impl IntoIterator<Item = usize>) -> Structure {
        let mask = members.into_iter().fold(0u64, |m, i| m | (1 << i));
        self.sets.insert(name.to_string(), mask);
        self
    }

    pub fn universe_mask(&self) -> u64 {
        if self.n >= 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// The structure with every predicate interpretation complemented.
    pub fn complement_preds(&self) -> Structure {
        let all = self.universe_mask();
        let mut out = self.clone();
        for v in out.preds.values_mut() {
            *v = !*v & all;
        }
        out
    }
}

pub fn eval_ils(phi: &Formula, s: &Structure) -> Result<bool, EvalError> {
    eval(phi, s, Successor::Circular)
}

pub fn eval_wss(phi: &Formula, s: &Structure) -> Result<bool, EvalError> {
    eval(phi, s, Successor::Looping)
}

pub fn eval(phi: &Formula, s: &Structure, succ: Successor) -> Result<bool, EvalError> {
    if s.n == 0 || s.n > 64 {
        return Err(EvalError::BadUniverse(s.n));
    }
    let mut ev = Evaluator { s, succ, vars: Vec::new(), sets: Vec::new() };
    ev.formula(phi)
}

struct Evaluator<'a> {
    s: &'a Structure,
    succ: Successor,
    vars: Vec<(&'a str, usize)>,
    sets: Vec<(&'a str, u64)>,
}

impl<'a> Evaluator<'a> {
    fn term(&self, t: &Term) -> Result<usize, EvalError> {
        let base = match &t.base {
            TermBase::Var(v) => match self.vars.iter().rev().find(|(name, _)| name == v) {
                Some(&(_, value)) => value,
                None => *self.s.vars.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?,
            },
            TermBase::Const(c) => *self.s.consts.get(c).ok_or_else(|| EvalError::Unbound(c.clone()))?,
            TermBase::Zero => 0,
        };
        let n = self.s.n;
        if base >= n {
            return Err(EvalError::Unbound(format!("{t} (value {base} outside universe)")));
        }
        Ok(match self.succ {
            Successor::Circular => (base + t.succs as usize) % n,
            Successor::Looping => (base + t.succs as usize).min(n - 1),
        })
    }

    fn set(&self, x: &str) -> Result<u64, EvalError> {
        match self.sets.iter().rev().find(|(name, _)| *name == x) {
            Some(&(_, m)) => Ok(m),
            None => self.s.sets.get(x).copied().ok_or_else(|| EvalError::Unbound(x.to_string())),
        }
    }

    fn formula(&mut self, f: &'a Formula) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(a, b) => self.term(a)? == self.term(b)?,
            Formula::Le(a, b) => self.term(a)? <= self.term(b)?,
            Formula::Lt(a, b) => self.term(a)? < self.term(b)?,
            Formula::Pred(p, t) => {
                let m = *self.s.preds.get(p).ok_or_else(|| EvalError::Unbound(p.clone()))?;
                m >> self.term(t)? & 1 == 1
            }
            Formula::SetMem(x, t) => {
                let i = self.term(t)?;
                self.set(x)? >> i & 1 == 1
            }
            Formula::Mod(t, k, l) => {
                if *k == 0 || l >= k {
                    return Err(EvalError::BadModulus);
                }
                self.term(t)? % *k as usize == *l as usize
            }
            Formula::Inf(t) => self.term(t)? == 0,
            Formula::Sup(t) => self.term(t)? == self.s.n - 1,
            Formula::Not(a) => !self.formula(a)?,
            Formula::And(xs) => {
                for x in xs {
                    if !self.formula(x)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(xs) => {
                for x in xs {
                    if self.formula(x)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.formula(a)? || self.formula(b)?,
            Formula::Iff(a, b) => self.formula(a)? == self.formula(b)?,
            Formula::Exists(v, body) => self.quantify(v, body, true)?,
            Formula::Forall(v, body) => self.quantify(v, body, false)?,
            Formula::ExistsSet(x, body) => self.quantify_set(x, body, true)?,
            Formula::ForallSet(x, body) => self.quantify_set(x, body, false)?,
        })
    }

    fn quantify(&mut self, v: &'a str, body: &'a Formula, existential: bool) -> Result<bool, EvalError> {
        for i in 0..self.s.n {
            self.vars.push((v, i));
            let r = self.formula(body);
            self.vars.pop();
            if r? == existential {
                return Ok(existential);
            }
        }
        Ok(!existential)
    }

    fn quantify_set(&mut self, x: &'a str, body: &'a Formula, existential: bool) -> Result<bool, EvalError> {
        for m in 0..=self.s.universe_mask() {
            self.sets.push((x, m));
            let r = self.formula(body);
            self.sets.pop();
            if r? == existential {
                return Ok(existential);
            }
        }
        Ok(!existential)
    }
}

/// Every structure of size `n` interpreting exactly `symbols`, in a fixed
/// order. Meant for exhaustive checks on small `n`.
pub fn all_structures(n: usize, symbols: &Symbols) -> Vec<Structure> {
    let mut out = vec![Structure::new(n)];
    let subsets = 1u64 << n;
    for v in symbols.vars.iter() {
        out = out.into_iter().flat_map(|s| (0..n).map(move |i| s.clone().with_var(v, i))).collect();
    }
    for c in symbols.consts.iter() {
        out = out.into_iter().flat_map(|s| (0..n).map(move |i| s.clone().with_const(c, i))).collect();
    }
    for p in symbols.preds.iter() {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..subsets).map(move |m| {
                    let mut s = s.clone();
                    s.preds.insert(p.clone(), m);
                    s
                })
            })
            .collect();
    }
    for x in symbols.sets.iter() {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..subsets).map(move |m| {
                    let mut s = s.clone();
                    s.sets.insert(x.clone(), m);
                    s
                })
            })
            .collect();
    }
    out
}
