//! Propositional formulas over variables `pr_i` and the fixed-size
//! translation of WS1S sentences into them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::logic::{Formula, Term, TermBase};

use super::PetriError;

/// `pred` at position `index`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropVar {
    pub pred: String,
    pub index: usize,
}

impl fmt::Display for PropVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.pred, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    True,
    False,
    Var(PropVar),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    pub fn var(pred: impl Into<String>, index: usize) -> Prop {
        Prop::Var(PropVar { pred: pred.into(), index })
    }

    pub fn constant(b: bool) -> Prop {
        if b {
            Prop::True
        } else {
            Prop::False
        }
    }

    pub fn not(p: Prop) -> Prop {
        match p {
            Prop::True => Prop::False,
            Prop::False => Prop::True,
            Prop::Not(q) => *q,
            q => Prop::Not(Box::new(q)),
        }
    }

    /// Conjunction with constant folding and flattening.
    pub fn and(parts: Vec<Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::True => {}
                Prop::False => return Prop::False,
                Prop::And(qs) => out.extend(qs),
                q => out.push(q),
            }
        }
        match out.len() {
            0 => Prop::True,
            1 => out.pop().unwrap(),
            _ => Prop::And(out),
        }
    }

    pub fn or(parts: Vec<Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::False => {}
                Prop::True => return Prop::True,
                Prop::Or(qs) => out.extend(qs),
                q => out.push(q),
            }
        }
        match out.len() {
            0 => Prop::False,
            1 => out.pop().unwrap(),
            _ => Prop::Or(out),
        }
    }

    pub fn eval(&self, val: &impl Fn(&PropVar) -> bool) -> bool {
        match self {
            Prop::True => true,
            Prop::False => false,
            Prop::Var(v) => val(v),
            Prop::Not(p) => !p.eval(val),
            Prop::And(ps) => ps.iter().all(|p| p.eval(val)),
            Prop::Or(ps) => ps.iter().any(|p| p.eval(val)),
        }
    }

    pub fn vars(&self) -> BTreeSet<PropVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<PropVar>) {
        match self {
            Prop::Var(v) => {
                out.insert(v.clone());
            }
            Prop::Not(p) => p.collect_vars(out),
            Prop::And(ps) | Prop::Or(ps) => ps.iter().for_each(|p| p.collect_vars(out)),
            _ => {}
        }
    }

    /// Swaps `&`/`|` and the constants; variables stay.
    pub fn dual(&self) -> Prop {
        match self {
            Prop::True => Prop::False,
            Prop::False => Prop::True,
            Prop::Var(_) => self.clone(),
            Prop::Not(p) => Prop::not(p.dual()),
            Prop::And(ps) => Prop::or(ps.iter().map(Prop::dual).collect()),
            Prop::Or(ps) => Prop::and(ps.iter().map(Prop::dual).collect()),
        }
    }

    fn nnf(&self, negate: bool) -> Prop {
        match self {
            Prop::True => Prop::constant(!negate),
            Prop::False => Prop::constant(negate),
            Prop::Var(_) if negate => Prop::Not(Box::new(self.clone())),
            Prop::Var(_) => self.clone(),
            Prop::Not(p) => p.nnf(!negate),
            Prop::And(ps) if negate => Prop::or(ps.iter().map(|p| p.nnf(true)).collect()),
            Prop::And(ps) => Prop::and(ps.iter().map(|p| p.nnf(false)).collect()),
            Prop::Or(ps) if negate => Prop::and(ps.iter().map(|p| p.nnf(true)).collect()),
            Prop::Or(ps) => Prop::or(ps.iter().map(|p| p.nnf(false)).collect()),
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::True => f.write_str("true"),
            Prop::False => f.write_str("false"),
            Prop::Var(v) => write!(f, "{v}"),
            Prop::Not(p) => write!(f, "!{p}"),
            Prop::And(ps) | Prop::Or(ps) => {
                let sep = if matches!(self, Prop::And(_)) { " & " } else { " | " };
                let parts: Vec<String> = ps.iter().map(|p| format!("{p}")).collect();
                write!(f, "({})", parts.join(sep))
            }
        }
    }
}

/// Literal `(var, polarity)`; a cube is a sorted, consistent literal set.
type Cube = BTreeSet<(PropVar, bool)>;

fn dnf(p: &Prop, cap: usize) -> Result<Vec<Cube>, PetriError> {
    Ok(match p {
        Prop::True => vec![Cube::new()],
        Prop::False => vec![],
        Prop::Var(v) => vec![Cube::from([(v.clone(), true)])],
        Prop::Not(q) => match q.as_ref() {
            Prop::Var(v) => vec![Cube::from([(v.clone(), false)])],
            _ => unreachable!("dnf expects negation normal form"),
        },
        Prop::Or(ps) => {
            let mut out = Vec::new();
            for q in ps {
                out.extend(dnf(q, cap)?);
                if out.len() > cap {
                    return Err(PetriError::DnfCap(cap));
                }
            }
            out
        }
        Prop::And(ps) => {
            let mut acc = vec![Cube::new()];
            for q in ps {
                let rhs = dnf(q, cap)?;
                let mut next = Vec::new();
                for a in &acc {
                    for b in &rhs {
                        let c: Cube = a.union(b).cloned().collect();
                        if !c.iter().any(|(v, s)| c.contains(&(v.clone(), !s))) {
                            next.push(c);
                        }
                    }
                    if next.len() > cap {
                        return Err(PetriError::DnfCap(cap));
                    }
                }
                next.sort();
                next.dedup();
                acc = next;
            }
            acc
        }
    })
}

/// Positive part: DNF with contradictory cubes dropped, then every
/// negative literal deleted.
pub fn pos(p: &Prop, cap: usize) -> Result<Prop, PetriError> {
    let cubes = dnf(&p.nnf(false), cap)?;
    let mut positive: Vec<BTreeSet<PropVar>> =
        cubes.into_iter().map(|c| c.into_iter().filter(|(_, s)| *s).map(|(v, _)| v).collect()).collect();
    positive.sort();
    positive.dedup();
    Ok(Prop::or(positive.into_iter().map(|c| Prop::and(c.into_iter().map(Prop::Var).collect())).collect()))
}

struct Env {
    n: usize,
    vars: HashMap<String, usize>,
    sets: HashMap<String, u64>,
}

impl Env {
    fn term(&self, t: &Term) -> Result<usize, PetriError> {
        let base = match &t.base {
            TermBase::Zero => 0,
            TermBase::Var(v) | TermBase::Const(v) => {
                *self.vars.get(v).ok_or_else(|| PetriError::NotASentence(format!("free `{v}`")))?
            }
        };
        Ok((base + t.succs as usize).min(self.n - 1))
    }

    fn go(&mut self, f: &Formula) -> Result<Prop, PetriError> {
        Ok(match f {
            Formula::True => Prop::True,
            Formula::False => Prop::False,
            Formula::Eq(a, b) => Prop::constant(self.term(a)? == self.term(b)?),
            Formula::Le(a, b) => Prop::constant(self.term(a)? <= self.term(b)?),
            Formula::Lt(a, b) => Prop::constant(self.term(a)? < self.term(b)?),
            Formula::Pred(p, t) => Prop::var(p.clone(), self.term(t)?),
            Formula::SetMem(x, t) => {
                let set = *self.sets.get(x).ok_or_else(|| PetriError::NotASentence(format!("free set `{x}`")))?;
                Prop::constant(set >> self.term(t)? & 1 == 1)
            }
            Formula::Mod(t, k, l) => Prop::constant(*k > 0 && self.term(t)? % *k as usize == *l as usize),
            Formula::Inf(t) => Prop::constant(self.term(t)? == 0),
            Formula::Sup(t) => Prop::constant(self.term(t)? == self.n - 1),
            Formula::Not(a) => Prop::not(self.go(a)?),
            Formula::And(xs) => Prop::and(xs.iter().map(|x| self.go(x)).collect::<Result<_, _>>()?),
            Formula::Or(xs) => Prop::or(xs.iter().map(|x| self.go(x)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => Prop::or(vec![Prop::not(self.go(a)?), self.go(b)?]),
            Formula::Iff(a, b) => {
                let (x, y) = (self.go(a)?, self.go(b)?);
                Prop::or(vec![Prop::and(vec![x.clone(), y.clone()]), Prop::and(vec![Prop::not(x), Prop::not(y)])])
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let saved = self.vars.get(v).copied();
                let mut parts = Vec::with_capacity(self.n);
                for i in 0..self.n {
                    self.vars.insert(v.clone(), i);
                    parts.push(self.go(a)?);
                }
                match saved {
                    Some(s) => self.vars.insert(v.clone(), s),
                    None => self.vars.remove(v),
                };
                if matches!(f, Formula::Exists(..)) {
                    Prop::or(parts)
                } else {
                    Prop::and(parts)
                }
            }
            Formula::ExistsSet(v, a) | Formula::ForallSet(v, a) => {
                if self.n > 4 {
                    return Err(PetriError::SetExpansion(self.n));
                }
                let saved = self.sets.get(v).copied();
                let mut parts = Vec::new();
                for m in 0..(1u64 << self.n) {
                    self.sets.insert(v.clone(), m);
                    parts.push(self.go(a)?);
                }
                match saved {
                    Some(s) => self.sets.insert(v.clone(), s),
                    None => self.sets.remove(v),
                };
                if matches!(f, Formula::ExistsSet(..)) {
                    Prop::or(parts)
                } else {
                    Prop::and(parts)
                }
            }
        })
    }
}

/// The sentence at size `n` (looping successor) as a propositional formula
/// over `pred_i`: first-order quantifiers become `n`-ary disjunctions and
/// conjunctions, set quantifiers range over all `2^n` subsets.
pub fn booleanize(phi: &Formula, n: usize) -> Result<Prop, PetriError> {
    if n == 0 {
        return Err(PetriError::EmptyNet);
    }
    let mut env = Env { n, vars: HashMap::new(), sets: HashMap::new() };
    env.go(phi)
}
