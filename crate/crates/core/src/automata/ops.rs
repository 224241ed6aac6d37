//! Language operations on [`TrackNfa`].

use std::collections::{HashMap, VecDeque};

use super::dd::{Dd, NO_LEAF};
use super::{AutomataError, Cube, StateId, Symbol, TrackKind, TrackNfa, TrackRegistry};

/// Subset construction. The result is complete: the empty macro-state
/// becomes an explicit sink when some symbols lead nowhere.
pub fn determinize(a: &TrackNfa) -> TrackNfa {
    if a.dfa {
        return a.clone();
    }
    let mut out = TrackNfa::new(a.registry.clone());
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut sets: Vec<Vec<StateId>> = Vec::new();

    let mut start = a.initial.clone();
    start.sort_unstable();
    start.dedup();
    let s0 = out.add_state(start.iter().any(|&s| a.finals[s as usize]));
    index.insert(start.clone(), s0);
    sets.push(start);
    out.add_initial(s0);

    let mut next = 0;
    while next < sets.len() {
        let id = next as StateId;
        next += 1;
        let entries: Vec<(Cube, StateId)> =
            sets[id as usize].iter().flat_map(|&s| a.edges[s as usize].iter().copied()).collect();
        // Leaves index into `pending`; interning happens after the walk.
        let mut pending: Vec<Vec<StateId>> = Vec::new();
        let mut leaf_of = |ps: &[StateId]| {
            let mut v = ps.to_vec();
            v.sort_unstable();
            v.dedup();
            match pending.iter().position(|p| *p == v) {
                Some(i) => i as u32,
                None => {
                    pending.push(v);
                    (pending.len() - 1) as u32
                }
            }
        };
        let mut dd = Dd::new();
        let root = dd.build(&entries, &mut leaf_of);
        let paths = dd.paths(root);
        let mut targets = Vec::with_capacity(pending.len());
        for v in pending {
            let t = match index.get(&v) {
                Some(&t) => t,
                None => {
                    let t = out.add_state(v.iter().any(|&s| a.finals[s as usize]));
                    index.insert(v.clone(), t);
                    sets.push(v);
                    t
                }
            };
            targets.push(t);
        }
        for (cube, leaf) in paths {
            out.add_edge(id, cube, targets[leaf as usize]);
        }
    }
    out.dfa = true;
    out
}

/// Minimal complete DFA, states numbered in breadth-first order from the
/// initial state with edges in diagram order, so equal languages give
/// identical automata.
pub fn minimize(a: &TrackNfa) -> TrackNfa {
    let d = determinize(a);
    let n = d.num_states();
    let mixed = d.finals.iter().any(|&f| f) && d.finals.iter().any(|&f| !f);
    let mut class: Vec<u32> = (0..n).map(|s| (mixed && d.finals[s]) as u32).collect();
    let mut count = 1 + mixed as usize;
    let (dd, roots) = loop {
        let mut dd = Dd::new();
        let mut roots = Vec::with_capacity(n);
        let mut sig: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for s in 0..n {
            let entries: Vec<(Cube, u32)> = d.edges[s].iter().map(|&(c, t)| (c, class[t as usize])).collect();
            let root = dd.build(&entries, &mut |ps: &[u32]| ps.first().copied().unwrap_or(NO_LEAF));
            roots.push(root);
            let fresh = sig.len() as u32;
            next.push(*sig.entry((class[s], root)).or_insert(fresh));
        }
        if sig.len() == count {
            break (dd, roots);
        }
        count = sig.len();
        class = next;
    };

    let mut rep: Vec<Option<usize>> = vec![None; count];
    for s in 0..n {
        rep[class[s] as usize].get_or_insert(s);
    }
    let mut out = TrackNfa::new(d.registry.clone());
    let mut number: Vec<Option<StateId>> = vec![None; count];
    let mut queue = VecDeque::new();
    let c0 = class[d.initial[0] as usize];
    number[c0 as usize] = Some(out.add_state(d.finals[rep[c0 as usize].unwrap()]));
    out.add_initial(0);
    queue.push_back(c0);
    while let Some(c) = queue.pop_front() {
        let from = number[c as usize].unwrap();
        for (cube, t) in dd.paths(roots[rep[c as usize].unwrap()]) {
            let to = match number[t as usize] {
                Some(id) => id,
                None => {
                    let id = out.add_state(d.finals[rep[t as usize].unwrap()]);
                    number[t as usize] = Some(id);
                    queue.push_back(t);
                    id
                }
            };
            out.add_edge(from, cube, to);
        }
    }
    out.dfa = true;
    out
}

/// Synchronous product; final pairs are those where `accept` holds.
fn pair_product(a: &TrackNfa, b: &TrackNfa, accept: impl Fn(bool, bool) -> bool) -> TrackNfa {
    let mut out = TrackNfa::new(a.registry.clone());
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut visit = |p: StateId, q: StateId, out: &mut TrackNfa, queue: &mut VecDeque<(StateId, StateId)>| {
        *index.entry((p, q)).or_insert_with(|| {
            queue.push_back((p, q));
            out.add_state(accept(a.finals[p as usize], b.finals[q as usize]))
        })
    };
    for &p in &a.initial {
        for &q in &b.initial {
            let id = visit(p, q, &mut out, &mut queue);
            out.add_initial(id);
        }
    }
    while let Some((p, q)) = queue.pop_front() {
        let from = visit(p, q, &mut out, &mut queue);
        for &(c1, t1) in &a.edges[p as usize] {
            for &(c2, t2) in &b.edges[q as usize] {
                if let Some(c) = c1.intersect(&c2) {
                    let to = visit(t1, t2, &mut out, &mut queue);
                    out.add_edge(from, c, to);
                }
            }
        }
    }
    out
}

/// `L(a) ∩ L(b)`.
pub fn product(a: &TrackNfa, b: &TrackNfa) -> Result<TrackNfa, AutomataError> {
    a.check_same_registry(b)?;
    let dfa = a.dfa && b.dfa;
    let mut out = pair_product(a, b, |x, y| x && y);
    out.dfa = dfa;
    Ok(out)
}

/// Boolean combination of two languages through the product of their
/// complete DFAs.
pub fn combine(a: &TrackNfa, b: &TrackNfa, op: impl Fn(bool, bool) -> bool) -> Result<TrackNfa, AutomataError> {
    a.check_same_registry(b)?;
    let (da, db) = (determinize(a), determinize(b));
    let mut out = pair_product(&da, &db, op);
    out.dfa = true;
    Ok(out)
}

/// `L(a) ∪ L(b)` as a disjoint sum.
pub fn union(a: &TrackNfa, b: &TrackNfa) -> Result<TrackNfa, AutomataError> {
    a.check_same_registry(b)?;
    let mut out = a.clone();
    out.dfa = false;
    let off = a.num_states() as StateId;
    for s in 0..b.num_states() {
        out.add_state(b.finals[s]);
    }
    for &s in &b.initial {
        out.add_initial(s + off);
    }
    for (s, es) in b.edges.iter().enumerate() {
        for &(c, t) in es {
            out.add_edge(s as StateId + off, c, t + off);
        }
    }
    Ok(out)
}

/// All words over the registry alphabet not in `L(a)`.
pub fn complement(a: &TrackNfa) -> TrackNfa {
    let mut d = determinize(a);
    for f in d.finals.iter_mut() {
        *f = !*f;
    }
    d
}

pub fn membership(a: &TrackNfa, word: &[Symbol]) -> bool {
    a.accepts(word)
}

pub fn is_empty(a: &TrackNfa) -> bool {
    a.is_empty()
}

/// Erases track `name`: the result accepts the words obtained from words
/// of `a` by deleting that track.
pub fn project_track(a: &TrackNfa, name: &str) -> Result<TrackNfa, AutomataError> {
    let i = a.registry.index_of(name).ok_or_else(|| AutomataError::UnknownTrack(name.to_string()))?;
    let registry = a.registry.without(name)?;
    let low = (1u64 << i) - 1;
    let squeeze = |x: u64| (x & low) | ((x >> (i + 1)) << i);
    let mut out = TrackNfa::new(registry);
    for s in 0..a.num_states() {
        out.add_state(a.finals[s]);
    }
    for &s in &a.initial {
        out.add_initial(s);
    }
    for (s, es) in a.edges.iter().enumerate() {
        for &(c, t) in es {
            out.add_edge(s as StateId, Cube::new(squeeze(c.value), squeeze(c.mask)), t);
        }
    }
    Ok(out)
}

/// Re-indexes `a` over the larger registry `to`; new tracks are unconstrained.
pub fn extend(a: &TrackNfa, to: &TrackRegistry) -> Result<TrackNfa, AutomataError> {
    if &a.registry == to {
        return Ok(a.clone());
    }
    let mut pos = Vec::with_capacity(a.registry.width());
    for t in a.registry.tracks() {
        match to.index_of(&t.name) {
            Some(j) if to.track(j).kind == t.kind => pos.push(j),
            _ => return Err(AutomataError::NotASubRegistry(a.registry.to_string(), to.to_string())),
        }
    }
    let spread = |x: u64| pos.iter().enumerate().fold(0u64, |m, (i, &j)| m | ((x >> i & 1) << j));
    let mut out = TrackNfa::new(to.clone());
    for s in 0..a.num_states() {
        out.add_state(a.finals[s]);
    }
    for &s in &a.initial {
        out.add_initial(s);
    }
    for (s, es) in a.edges.iter().enumerate() {
        for &(c, t) in es {
            out.add_edge(s as StateId, Cube::new(spread(c.value), spread(c.mask)), t);
        }
    }
    out.dfa = a.dfa;
    Ok(out)
}

fn check_pred_mask(a: &TrackNfa, tracks: u64) -> Result<(), AutomataError> {
    let preds = a.registry.kind_mask(TrackKind::Predicate);
    if tracks & !preds != 0 {
        let bad = (tracks & !preds).trailing_zeros() as usize;
        return Err(if bad < a.registry.width() {
            AutomataError::NotPredicate(a.registry.track(bad).name.clone())
        } else {
            AutomataError::UnknownTrack(format!("#{bad}"))
        });
    }
    Ok(())
}

/// Upward closure on the given predicate tracks: a transition reading 0 on
/// such a track also reads 1. Cared 0-bits simply stop being cared.
pub fn saturate(a: &TrackNfa, tracks: u64) -> Result<TrackNfa, AutomataError> {
    check_pred_mask(a, tracks)?;
    let mut out = a.clone();
    out.dfa = false;
    for es in out.edges.iter_mut() {
        for (c, _) in es.iter_mut() {
            c.mask &= !(tracks & !c.value);
        }
        es.sort_unstable();
        es.dedup();
    }
    Ok(out)
}

/// Complements the given predicate tracks on every transition.
pub fn flip_predicate_tracks(a: &TrackNfa, tracks: u64) -> Result<TrackNfa, AutomataError> {
    check_pred_mask(a, tracks)?;
    let mut out = a.clone();
    for es in out.edges.iter_mut() {
        for (c, _) in es.iter_mut() {
            c.value ^= c.mask & tracks;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::testutil::{pred_registry, random_nfa, words, words_up_to};
    use crate::automata::Track;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn same_language(a: &TrackNfa, b: &TrackNfa, max_len: usize) -> bool {
        let w = a.registry().width();
        words_up_to(w, max_len).iter().all(|x| a.accepts(x) == b.accepts(x))
    }

    fn all_zero(len: usize) -> TrackNfa {
        // a chain of `len` states all accepting, reading p = 0
        let reg = pred_registry(1);
        let mut a = TrackNfa::new(reg);
        for _ in 0..len {
            a.add_state(true);
        }
        a.add_initial(0);
        for s in 0..len as StateId {
            let t = if (s as usize) + 1 < len { s + 1 } else { s };
            a.add_edge(s, Cube::new(0, 1), t);
        }
        a
    }

    #[test]
    fn minimize_collapses_chains() {
        let a = all_zero(10);
        let m = minimize(&a);
        assert!(m.num_states() <= 2);
        assert!(same_language(&a, &m, 6));
        assert_eq!(minimize(&m).num_states(), m.num_states());
    }

    #[test]
    fn random_boolean_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let w = 1 + (rand::Rng::gen_range(&mut rng, 0..3));
            let a = random_nfa(&mut rng, w, 4);
            let b = random_nfa(&mut rng, w, 4);
            let ws = words_up_to(w, if w == 3 { 3 } else { 5 });
            let ca = complement(&a);
            let cca = complement(&ca);
            let m = minimize(&a);
            let p = product(&a, &b).unwrap();
            let u = union(&a, &b).unwrap();
            let x = combine(&a, &b, |x, y| x != y).unwrap();
            let d = determinize(&a);
            for word in &ws {
                let (ia, ib) = (a.accepts(word), b.accepts(word));
                assert_eq!(ca.accepts(word), !ia);
                assert_eq!(cca.accepts(word), ia);
                assert_eq!(m.accepts(word), ia);
                assert_eq!(d.accepts(word), ia);
                assert_eq!(p.accepts(word), ia && ib);
                assert_eq!(u.accepts(word), ia || ib);
                assert_eq!(x.accepts(word), ia != ib);
            }
            assert!(is_empty(&product(&a, &ca).unwrap()));
            let univ = TrackNfa::universal(a.registry().clone());
            assert!(same_language(&product(&a, &univ).unwrap(), &a, 3));
        }
    }

    #[test]
    fn minimization_is_canonical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = random_nfa(&mut rng, 2, 4);
            let m1 = minimize(&a);
            let m2 = minimize(&complement(&complement(&a)));
            assert_eq!(m1, m2);
            assert_eq!(minimize(&m1), m1);
        }
    }

    #[test]
    fn projection_erases_a_track() {
        let reg = TrackRegistry::new([Track::fo("x"), Track::pred("p")]).unwrap();
        // x-track exactly one 1, and p is 1 there
        let mut a = TrackNfa::new(reg);
        let s0 = a.add_state(false);
        let s1 = a.add_state(true);
        a.add_initial(s0);
        a.add_edge(s0, Cube::new(0, 1), s0);
        a.add_edge(s0, Cube::new(0b11, 0b11), s1);
        a.add_edge(s1, Cube::new(0, 1), s1);
        let p = project_track(&a, "x").unwrap();
        assert_eq!(p.registry().names(), vec!["p"]);
        for len in 1..=5 {
            for w in words(1, len) {
                assert_eq!(p.accepts(&w), w.iter().any(|&s| s == 1));
            }
        }
        assert!(matches!(project_track(&a, "q"), Err(AutomataError::UnknownTrack(_))));
        let e = TrackNfa::empty_language(a.registry().clone());
        let pe = project_track(&project_track(&e, "x").unwrap(), "p").unwrap();
        assert!(pe.is_empty());
    }

    #[test]
    fn extend_then_project_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_nfa(&mut rng, 2, 4);
        let big = a.registry().union(&TrackRegistry::new([Track::pred("p1a")]).unwrap()).unwrap();
        let e = extend(&a, &big).unwrap();
        assert_eq!(e.registry().width(), 3);
        let back = project_track(&e, "p1a").unwrap();
        assert!(same_language(&a, &back, 4));
    }

    #[test]
    fn saturate_rule_instance() {
        let reg = pred_registry(2);
        let mut a = TrackNfa::new(reg);
        let s = a.add_state(true);
        a.add_initial(s);
        a.add_edge(s, Cube::new(0b10, 0b11), s);
        let sat = saturate(&a, 0b11).unwrap();
        let accepted: Vec<u64> = (0..4).filter(|&x| sat.accepts(&[x])).collect();
        assert_eq!(accepted, vec![0b10, 0b11]);
    }

    fn leq(u: &[u64], v: &[u64]) -> bool {
        u.len() == v.len() && u.iter().zip(v).all(|(a, b)| a & !b == 0)
    }

    fn minimal_words(a: &TrackNfa, ws: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let acc: Vec<&Vec<u64>> = ws.iter().filter(|w| a.accepts(w)).collect();
        acc.iter().filter(|w| !acc.iter().any(|v| v != *w && leq(v, w))).map(|w| (*w).clone()).collect()
    }

    #[test]
    fn saturation_preserves_minimal_language() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..200 {
            let w = 1 + rand::Rng::gen_range(&mut rng, 0..3);
            let a = random_nfa(&mut rng, w, 4);
            let all = a.registry().all_mask();
            let sat = saturate(&a, all).unwrap();
            let max_len = if w == 3 { 3 } else { 5 };
            for len in 0..=max_len {
                let ws = words(w, len);
                for x in &ws {
                    if a.accepts(x) {
                        assert!(sat.accepts(x));
                    }
                }
                assert_eq!(minimal_words(&a, &ws), minimal_words(&sat, &ws));
            }
            let sat2 = saturate(&sat, all).unwrap();
            assert!(same_language(&sat, &sat2, 3));
        }
    }

    #[test]
    fn flip_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let a = random_nfa(&mut rng, 2, 4);
            let f = flip_predicate_tracks(&a, 0b01).unwrap();
            let ff = flip_predicate_tracks(&f, 0b01).unwrap();
            assert_eq!(ff, a);
            for word in words_up_to(2, 4) {
                let flipped: Vec<u64> = word.iter().map(|s| s ^ 0b01).collect();
                assert_eq!(f.accepts(&word), a.accepts(&flipped));
            }
        }
    }

    #[test]
    fn flip_all_ones_gives_all_zeros() {
        let reg = pred_registry(1);
        let mut a = TrackNfa::new(reg);
        let s = a.add_state(true);
        a.add_initial(s);
        a.add_edge(s, Cube::new(1, 1), s);
        let f = flip_predicate_tracks(&a, 1).unwrap();
        for word in words_up_to(1, 4) {
            assert_eq!(f.accepts(&word), word.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn saturate_rejects_non_predicate_tracks() {
        let reg = TrackRegistry::new([Track::fo("x")]).unwrap();
        let a = TrackNfa::universal(reg);
        assert!(matches!(saturate(&a, 1), Err(AutomataError::NotPredicate(_))));
    }

    #[test]
    fn registry_mismatch_is_reported() {
        let a = TrackNfa::universal(pred_registry(1));
        let b = TrackNfa::universal(pred_registry(2));
        assert!(matches!(product(&a, &b), Err(AutomataError::RegistryMismatch(..))));
    }
}
