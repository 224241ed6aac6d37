//! The formula read off an automaton, keeping only positive predicate
//! literals. Set variable `_q{i}` holds the positions after which the run
//! is in state `i`.

use crate::automata::{Cube, TrackKind, TrackNfa};
use crate::logic::{Formula, Term};

use super::CompileError;

fn member(q: usize, t: &Term) -> Formula {
    Formula::SetMem(format!("_q{q}"), t.clone())
}

/// Conjunction of `pr(t)` for the tracks the cube requires to be 1.
fn positive_literals(a: &TrackNfa, cube: &Cube, t: &Term) -> Vec<Formula> {
    let reg = a.registry();
    (0..reg.width())
        .filter(|&i| cube.mask >> i & 1 == 1 && cube.value >> i & 1 == 1)
        .map(|i| Formula::Pred(reg.track(i).name.clone(), t.clone()))
        .collect()
}

/// `exists set _q0 ... . cover & init & step & accept` for the trimmed `a`.
/// Its models are the words of `a` closed upward on every predicate track.
pub fn positive_formula_of(a: &TrackNfa) -> Result<Formula, CompileError> {
    let reg = a.registry();
    if let Some(t) = reg.tracks().iter().find(|t| t.kind != TrackKind::Predicate) {
        return Err(CompileError::NotPredicateOnly(t.name.clone()));
    }
    let a = a.trim();
    let m = a.num_states();
    if m == 0 {
        return Ok(Formula::False);
    }
    let x = Term::var("x");
    let y = Term::var("y");

    // every position carries exactly one state label
    let cover = Formula::forall(
        "x",
        Formula::or(
            (0..m)
                .map(|q| {
                    let mut parts = vec![member(q, &x)];
                    parts.extend((0..m).filter(|&r| r != q).map(|r| Formula::not(member(r, &x))));
                    Formula::and(parts)
                })
                .collect(),
        ),
    );

    let mut first = Vec::new();
    for &i in a.initial() {
        for &(c, t) in a.edges(i) {
            let mut parts = vec![member(t as usize, &x)];
            parts.extend(positive_literals(&a, &c, &x));
            first.push(Formula::and(parts));
        }
    }
    let init = Formula::forall("x", Formula::implies(Formula::Inf(x.clone()), Formula::or(first)));

    let mut steps = Vec::new();
    for (s, c, t) in a.transitions() {
        let mut parts = vec![member(s as usize, &x), member(t as usize, &y)];
        parts.extend(positive_literals(&a, &c, &y));
        steps.push(Formula::and(parts));
    }
    let step = Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::implies(
                Formula::and(vec![Formula::Eq(x.clone().succ(), y.clone()), Formula::Lt(x.clone(), y.clone())]),
                Formula::or(steps),
            ),
        ),
    );

    let accept = Formula::forall(
        "x",
        Formula::implies(
            Formula::Sup(x.clone()),
            Formula::or((0..m).filter(|&q| a.is_final(q as u32)).map(|q| member(q, &x)).collect()),
        ),
    );

    let body = Formula::and(vec![cover, init, step, accept]);
    Ok((0..m).rev().fold(body, |acc, q| Formula::exists_set(format!("_q{q}"), acc)))
}
