//! Traps: place sets that stay marked once marked. A marking reachable
//! from the initial one marks every initially marked trap (IMT).

use super::boolean::{Prop, PropVar};
use super::{Marking, MarkedPetriNet, PetriError};

/// Sorted place indices.
pub type Trap = Vec<usize>;

/// Every transition taking a token from `w` puts one back into `w`.
pub fn is_trap(net: &MarkedPetriNet, w: &[usize]) -> bool {
    let mut inw = vec![false; net.places.len()];
    for &p in w {
        inw[p] = true;
    }
    net.transitions.iter().all(|t| !t.pre.iter().any(|&p| inw[p]) || t.post.iter().any(|&p| inw[p]))
}

fn is_subset(small: &[usize], big: &[bool]) -> bool {
    small.iter().all(|&p| big[p])
}

fn keep_minimal(mut traps: Vec<Trap>) -> Vec<Trap> {
    traps.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    traps.dedup();
    let mut kept: Vec<Trap> = Vec::new();
    for t in traps {
        if !kept.iter().any(|k| k.iter().all(|p| t.binary_search(p).is_ok())) {
            kept.push(t);
        }
    }
    kept.sort();
    kept
}

struct Search<'a> {
    net: &'a MarkedPetriNet,
    found: Vec<Trap>,
}

impl Search<'_> {
    fn run(&mut self, inw: &mut Vec<bool>, excluded: &mut Vec<bool>) {
        if self.found.iter().any(|t| is_subset(t, inw)) {
            return;
        }
        let violated = self
            .net
            .transitions
            .iter()
            .find(|t| t.pre.iter().any(|&p| inw[p]) && !t.post.iter().any(|&p| inw[p]));
        let Some(t) = violated else {
            self.found.push((0..inw.len()).filter(|&p| inw[p]).collect());
            return;
        };
        let choices: Vec<usize> = t.post.iter().copied().filter(|&q| !excluded[q]).collect();
        let mut newly_excluded = Vec::new();
        for q in choices {
            inw[q] = true;
            self.run(inw, excluded);
            inw[q] = false;
            excluded[q] = true;
            newly_excluded.push(q);
        }
        for q in newly_excluded {
            excluded[q] = false;
        }
    }
}

/// The ⊆-minimal nonempty traps containing an initially marked place.
/// Branches on which post-place repairs the first violated transition,
/// excluding places already tried at the same branch point.
pub fn enumerate_min_imts(net: &MarkedPetriNet, place_cap: usize) -> Result<Vec<Trap>, PetriError> {
    let n = net.places.len();
    if n > place_cap {
        return Err(PetriError::TrapCap { places: n, cap: place_cap });
    }
    let mut search = Search { net, found: Vec::new() };
    let mut inw = vec![false; n];
    let mut excluded = vec![false; n];
    for p in net.initial.marked() {
        inw[p] = true;
        search.run(&mut inw, &mut excluded);
        inw[p] = false;
        excluded[p] = true;
    }
    Ok(keep_minimal(search.found))
}

/// Minimal IMTs by checking every subset of places.
pub fn min_imts_exhaustive(net: &MarkedPetriNet) -> Result<Vec<Trap>, PetriError> {
    let n = net.places.len();
    if n > 16 {
        return Err(PetriError::TrapCap { places: n, cap: 16 });
    }
    let mut traps = Vec::new();
    for mask in 1u32..(1 << n) {
        let w: Vec<usize> = (0..n).filter(|&p| mask >> p & 1 == 1).collect();
        if w.iter().any(|&p| net.initial.get(p)) && is_trap(net, &w) {
            traps.push(w);
        }
    }
    Ok(keep_minimal(traps))
}

/// `m` marks every trap of the list.
pub fn marks_all(m: &Marking, traps: &[Trap]) -> bool {
    traps.iter().all(|t| t.iter().any(|&p| m.get(p)))
}

/// All valuations of the places marking every minimal IMT, sorted.
pub fn all_trap_valuations(net: &MarkedPetriNet, place_cap: usize) -> Result<Vec<Marking>, PetriError> {
    let n = net.places.len();
    if n > 20 {
        return Err(PetriError::TooManyBits(n));
    }
    let traps = enumerate_min_imts(net, place_cap)?;
    let mut out = Vec::new();
    for mask in 0u64..(1 << n) {
        let m = Marking::from_places(n, (0..n).filter(|&p| mask >> p & 1 == 1));
        if marks_all(&m, &traps) {
            out.push(m);
        }
    }
    out.sort();
    Ok(out)
}

/// Propositional variable of a place: its state predicate at its slot.
pub fn place_var(net: &MarkedPetriNet, p: usize) -> PropVar {
    let pl = &net.places[p];
    PropVar { pred: format!("{}.{}", pl.ty, pl.state), index: pl.slot }
}

/// `mu0 & theta(N)`: the sets of places that are initially marked traps.
pub fn trap_constraint_prop(net: &MarkedPetriNet) -> Prop {
    let var = |p: usize| Prop::Var(place_var(net, p));
    let mut parts = vec![Prop::or(net.initial.marked().map(var).collect())];
    for t in &net.transitions {
        parts.push(Prop::or(vec![
            Prop::not(Prop::or(t.pre.iter().map(|&p| var(p)).collect())),
            Prop::or(t.post.iter().map(|&p| var(p)).collect()),
        ]));
    }
    Prop::and(parts)
}
