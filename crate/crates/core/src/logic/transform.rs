use std::collections::BTreeSet;

use thiserror::Error;

use super::{Formula, Term, TermBase, RESERVED_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("formula is not flat: `{0}`")]
    NotFlat(String),
}

/// Deterministic fresh-name supply. Names start with the reserved prefix
/// and avoid everything already present in the formulas it was seeded with.
#[derive(Debug, Clone, Default)]
pub struct Gensym {
    used: BTreeSet<String>,
    counter: usize,
}

impl Gensym {
    pub fn for_formula(f: &Formula) -> Gensym {
        Gensym { used: f.all_names(), counter: 0 }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, stem: &str) -> String {
        loop {
            let name = format!("{RESERVED_PREFIX}{stem}{}", self.counter);
            self.counter += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }

    /// `_stem` itself if free, otherwise a numbered variant.
    pub fn fresh_exact(&mut self, stem: &str) -> String {
        let name = format!("{RESERVED_PREFIX}{stem}");
        if self.used.insert(name.clone()) {
            name
        } else {
            self.fresh(stem)
        }
    }
}

/// Negation normal form: negations only in front of atoms, no `->`/`<->`.
pub fn nnf(f: &Formula) -> Formula {
    to_nnf(f, true)
}

fn to_nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::True => if positive { Formula::True } else { Formula::False },
        Formula::False => if positive { Formula::False } else { Formula::True },
        Formula::Not(a) => to_nnf(a, !positive),
        Formula::And(xs) => {
            let parts = xs.iter().map(|x| to_nnf(x, positive)).collect();
            if positive { Formula::And(parts) } else { Formula::Or(parts) }
        }
        Formula::Or(xs) => {
            let parts = xs.iter().map(|x| to_nnf(x, positive)).collect();
            if positive { Formula::Or(parts) } else { Formula::And(parts) }
        }
        Formula::Implies(a, b) => {
            if positive {
                Formula::Or(vec![to_nnf(a, false), to_nnf(b, true)])
            } else {
                Formula::And(vec![to_nnf(a, true), to_nnf(b, false)])
            }
        }
        Formula::Iff(a, b) => {
            // a <-> b  ==  (!a | b) & (a | !b);  !(a <-> b)  ==  (a | b) & (!a | !b)
            if positive {
                Formula::And(vec![
                    Formula::Or(vec![to_nnf(a, false), to_nnf(b, true)]),
                    Formula::Or(vec![to_nnf(a, true), to_nnf(b, false)]),
                ])
            } else {
                Formula::And(vec![
                    Formula::Or(vec![to_nnf(a, true), to_nnf(b, true)]),
                    Formula::Or(vec![to_nnf(a, false), to_nnf(b, false)]),
                ])
            }
        }
        Formula::Exists(v, a) => {
            let body = Box::new(to_nnf(a, positive));
            if positive { Formula::Exists(v.clone(), body) } else { Formula::Forall(v.clone(), body) }
        }
        Formula::Forall(v, a) => {
            let body = Box::new(to_nnf(a, positive));
            if positive { Formula::Forall(v.clone(), body) } else { Formula::Exists(v.clone(), body) }
        }
        Formula::ExistsSet(v, a) => {
            let body = Box::new(to_nnf(a, positive));
            if positive { Formula::ExistsSet(v.clone(), body) } else { Formula::ForallSet(v.clone(), body) }
        }
        Formula::ForallSet(v, a) => {
            let body = Box::new(to_nnf(a, positive));
            if positive { Formula::ForallSet(v.clone(), body) } else { Formula::ExistsSet(v.clone(), body) }
        }
        atom => {
            if positive {
                atom.clone()
            } else {
                Formula::not(atom.clone())
            }
        }
    }
}

/// Dualization: predicate literals stay, every other literal is negated,
/// `&`/`|` and the quantifiers are swapped. The input is brought into NNF first.
pub fn dualize(f: &Formula) -> Formula {
    dual_nnf(&nnf(f))
}

fn dual_nnf(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Pred(..) => f.clone(),
        Formula::Not(a) => match a.as_ref() {
            Formula::Pred(..) => f.clone(),
            atom => atom.clone(),
        },
        Formula::And(xs) => Formula::Or(xs.iter().map(dual_nnf).collect()),
        Formula::Or(xs) => Formula::And(xs.iter().map(dual_nnf).collect()),
        Formula::Exists(v, a) => Formula::forall(v.clone(), dual_nnf(a)),
        Formula::Forall(v, a) => Formula::exists(v.clone(), dual_nnf(a)),
        Formula::ExistsSet(v, a) => Formula::forall_set(v.clone(), dual_nnf(a)),
        Formula::ForallSet(v, a) => Formula::exists_set(v.clone(), dual_nnf(a)),
        Formula::Implies(..) | Formula::Iff(..) => unreachable!("input is in NNF"),
        atom => Formula::not(atom.clone()),
    }
}

/// Name of the fresh variable standing for constant `c` after flattening.
pub(crate) fn const_var(c: &str) -> String {
    format!("{RESERVED_PREFIX}c_{c}")
}

/// Removes nested successors and constants: afterwards `succ` only occurs
/// in atoms `succ(x) = y` over variables, and every constant `c` has become
/// the free variable `_c_c`. `inf`/`sup` are expanded.
pub fn flatten(f: &Formula) -> Formula {
    let mut gen = Gensym::for_formula(f);
    let f = f.map_terms(&|t| match &t.base {
        TermBase::Const(c) => Term { base: TermBase::Var(const_var(c)), succs: t.succs },
        _ => t.clone(),
    });
    for name in f.all_names() {
        gen.reserve(&name);
    }
    flatten_rec(&f, &mut gen)
}

fn flatten_rec(f: &Formula, gen: &mut Gensym) -> Formula {
    match f {
        Formula::Not(a) => Formula::not(flatten_rec(a, gen)),
        Formula::And(xs) => Formula::And(xs.iter().map(|x| flatten_rec(x, gen)).collect()),
        Formula::Or(xs) => Formula::Or(xs.iter().map(|x| flatten_rec(x, gen)).collect()),
        Formula::Implies(a, b) => Formula::implies(flatten_rec(a, gen), flatten_rec(b, gen)),
        Formula::Iff(a, b) => Formula::iff(flatten_rec(a, gen), flatten_rec(b, gen)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), flatten_rec(a, gen)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), flatten_rec(a, gen)),
        Formula::ExistsSet(v, a) => Formula::exists_set(v.clone(), flatten_rec(a, gen)),
        Formula::ForallSet(v, a) => Formula::forall_set(v.clone(), flatten_rec(a, gen)),
        atom => flatten_atom(atom, gen),
    }
}

/// `succ^i(x) = y` as a chain of single successor steps:
/// `forall x1. succ(x) = x1 -> ... succ(x_{i-1}) = y`.
fn succ_chain(base: &Term, i: u32, y: &Term, gen: &mut Gensym) -> Formula {
    debug_assert!(i >= 1);
    if i == 1 {
        return Formula::Eq(base.clone().succ(), y.clone());
    }
    let x1 = gen.fresh("f");
    Formula::forall(
        x1.clone(),
        Formula::implies(
            Formula::Eq(base.clone().succ(), Term::var(x1.clone())),
            succ_chain(&Term::var(x1), i - 1, y, gen),
        ),
    )
}

fn base_of(t: &Term) -> Term {
    Term { base: t.base.clone(), succs: 0 }
}

fn flatten_atom(atom: &Formula, gen: &mut Gensym) -> Formula {
    match atom {
        Formula::Eq(a, b) => match (a.succs, b.succs) {
            (0, 0) => atom.clone(),
            (i, 0) => succ_chain(&base_of(a), i, b, gen),
            (0, j) => succ_chain(&base_of(b), j, a, gen),
            (i, j) => {
                let z = gen.fresh("f");
                let zt = Term::var(z.clone());
                Formula::exists(
                    z,
                    Formula::And(vec![
                        succ_chain(&base_of(b), j, &zt, gen),
                        succ_chain(&base_of(a), i, &zt, gen),
                    ]),
                )
            }
        },
        Formula::Inf(t) => {
            let y = gen.fresh("f");
            let le = Formula::Le(t.clone(), Term::var(y.clone()));
            Formula::forall(y, flatten_atom(&le, gen))
        }
        Formula::Sup(t) => {
            let y = gen.fresh("f");
            let le = Formula::Le(Term::var(y.clone()), t.clone());
            Formula::forall(y, flatten_atom(&le, gen))
        }
        Formula::True | Formula::False => atom.clone(),
        _ => {
            // pr(t), X(t), mod(t,k,l), t1 <= t2, t1 < t2 with nested successors:
            // name every compound term by a fresh variable.
            let mut binders = Vec::new();
            let mut defs = Vec::new();
            let mut replace = |t: &Term, gen: &mut Gensym| -> Term {
                if t.succs == 0 {
                    return t.clone();
                }
                let z = gen.fresh("f");
                let zt = Term::var(z.clone());
                defs.push(succ_chain(&base_of(t), t.succs, &zt, gen));
                binders.push(z);
                zt
            };
            let flat = match atom {
                Formula::Le(a, b) => {
                    let a2 = replace(a, gen);
                    Formula::Le(a2, replace(b, gen))
                }
                Formula::Lt(a, b) => {
                    let a2 = replace(a, gen);
                    Formula::Lt(a2, replace(b, gen))
                }
                Formula::Pred(p, t) => Formula::Pred(p.clone(), replace(t, gen)),
                Formula::SetMem(x, t) => Formula::SetMem(x.clone(), replace(t, gen)),
                Formula::Mod(t, k, l) => Formula::Mod(replace(t, gen), *k, *l),
                other => unreachable!("non-atom {other:?}"),
            };
            if binders.is_empty() {
                return flat;
            }
            defs.push(flat);
            let mut out = Formula::And(defs);
            for z in binders.into_iter().rev() {
                out = Formula::exists(z, out);
            }
            out
        }
    }
}

/// True if successors only occur in atoms `succ(x) = y` over plain variables
/// and no `inf`/`sup` sugar remains.
pub fn is_flat(f: &Formula) -> bool {
    let mut flat = true;
    f.visit(&mut |g| match g {
        Formula::Eq(a, b) => {
            let ok = (a.succs == 0 && b.succs == 0)
                || (a.succs == 1 && b.succs == 0 && matches!(a.base, TermBase::Var(_)));
            flat &= ok;
        }
        Formula::Inf(_) | Formula::Sup(_) => flat = false,
        g if g.is_atom() => {
            flat &= g.atom_terms().iter().all(|t| t.succs == 0);
        }
        _ => {}
    });
    flat
}

/// Embeds a flat IL1S formula into WS1S:
/// `Tr(phi) = exists xi. (forall y. y <= xi) & tr(phi)` where `tr` turns the
/// circular successor into the looping one plus a wrap-around case at `xi`.
pub fn translate_tr(f: &Formula) -> Result<Formula, TransformError> {
    if !is_flat(f) {
        return Err(TransformError::NotFlat(f.to_string()));
    }
    let mut gen = Gensym::for_formula(f);
    let xi = gen.fresh_exact("xi");
    let y = gen.fresh_exact("y");
    let body = tr(f, &Term::var(xi.clone()));
    Ok(Formula::exists(
        xi.clone(),
        Formula::And(vec![
            Formula::forall(y.clone(), Formula::Le(Term::var(y), Term::var(xi))),
            body,
        ]),
    ))
}

fn tr(f: &Formula, xi: &Term) -> Formula {
    match f {
        Formula::Eq(a, b) if a.succs == 1 => {
            let x = base_of(a);
            Formula::Or(vec![
                Formula::And(vec![Formula::Lt(x.clone(), xi.clone()), f.clone()]),
                Formula::And(vec![Formula::Eq(x, xi.clone()), Formula::Eq(b.clone(), Term::zero())]),
            ])
        }
        Formula::Not(a) => Formula::not(tr(a, xi)),
        Formula::And(xs) => Formula::And(xs.iter().map(|x| tr(x, xi)).collect()),
        Formula::Or(xs) => Formula::Or(xs.iter().map(|x| tr(x, xi)).collect()),
        Formula::Implies(a, b) => Formula::implies(tr(a, xi), tr(b, xi)),
        Formula::Iff(a, b) => Formula::iff(tr(a, xi), tr(b, xi)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), tr(a, xi)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), tr(a, xi)),
        Formula::ExistsSet(v, a) => Formula::exists_set(v.clone(), tr(a, xi)),
        Formula::ForallSet(v, a) => Formula::forall_set(v.clone(), tr(a, xi)),
        atom => atom.clone(),
    }
}
