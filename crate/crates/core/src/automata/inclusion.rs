//! Language inclusion by on-the-fly subset construction of the right-hand
//! automaton, pruning macro-states that contain an already seen one.

use std::collections::HashMap;

use super::dd::{Dd, NO_LEAF};
use super::{AutomataError, Cube, StateId, Symbol, TrackNfa};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inclusion {
    pub included: bool,
    /// Shortest, then lexicographically least, word of `L(a) \ L(b)`.
    pub witness: Option<Vec<Symbol>>,
    /// Pairs expanded during the search.
    pub steps: usize,
}

type Macro = Vec<StateId>;

/// Symbol regions from (`ps`, `set`) with the `a`-successors and the `b`
/// macro-successor; regions without an `a`-successor are dropped.
fn successors(a: &TrackNfa, b: &TrackNfa, ps: &[StateId], set: &[StateId]) -> Vec<(Cube, Macro, Macro)> {
    let mut entries: Vec<(Cube, (bool, StateId))> = Vec::new();
    for &p in ps {
        entries.extend(a.edges(p).iter().map(|&(c, t)| (c, (true, t))));
    }
    for &q in set {
        entries.extend(b.edges(q).iter().map(|&(c, t)| (c, (false, t))));
    }
    let mut pending: Vec<(Macro, Macro)> = Vec::new();
    let mut leaf_of = |payload: &[(bool, StateId)]| {
        let mut left: Macro = payload.iter().filter(|x| x.0).map(|x| x.1).collect();
        if left.is_empty() {
            return NO_LEAF;
        }
        let mut right: Macro = payload.iter().filter(|x| !x.0).map(|x| x.1).collect();
        left.sort_unstable();
        left.dedup();
        right.sort_unstable();
        right.dedup();
        let key = (left, right);
        match pending.iter().position(|k| *k == key) {
            Some(i) => i as u32,
            None => {
                pending.push(key);
                (pending.len() - 1) as u32
            }
        }
    };
    let mut dd = Dd::new();
    let root = dd.build(&entries, &mut leaf_of);
    dd.paths(root).into_iter().map(|(c, i)| (c, pending[i as usize].0.clone(), pending[i as usize].1.clone())).collect()
}

fn is_subset(small: &[StateId], big: &[StateId]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

#[derive(Default)]
struct Antichain {
    minimal: HashMap<StateId, Vec<Macro>>,
}

impl Antichain {
    /// Records `(p, set)` unless a subset of `set` is already there.
    fn insert(&mut self, p: StateId, set: &Macro) -> bool {
        let list = self.minimal.entry(p).or_default();
        if list.iter().any(|t| is_subset(t, set)) {
            return false;
        }
        list.retain(|t| !is_subset(set, t));
        list.push(set.clone());
        true
    }
}

fn rejecting(b: &TrackNfa, set: &[StateId]) -> bool {
    !set.iter().any(|&q| b.is_final(q))
}

fn bad(a: &TrackNfa, b: &TrackNfa, p: StateId, set: &[StateId]) -> bool {
    a.is_final(p) && rejecting(b, set)
}

/// Some word of length exactly `k` leads from one of `ps` (paired with
/// `set`) to a final `a`-state and a rejecting macro-state.
fn completable(a: &TrackNfa, b: &TrackNfa, ps: &[StateId], set: &Macro, k: usize) -> bool {
    let mut level: Vec<(StateId, Macro)> = ps.iter().map(|&p| (p, set.clone())).collect();
    for _ in 0..k {
        let mut seen = Antichain::default();
        let mut next = Vec::new();
        for (p, s) in &level {
            for (_, left, right) in successors(a, b, &[*p], s) {
                for q in left {
                    if seen.insert(q, &right) {
                        next.push((q, right.clone()));
                    }
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        level = next;
    }
    level.iter().any(|(p, s)| bad(a, b, *p, s))
}

/// Decides `L(a) ⊆ L(b)`.
pub fn antichain_included(a: &TrackNfa, b: &TrackNfa) -> Result<Inclusion, AutomataError> {
    a.check_same_registry(b)?;
    let mut start: Macro = b.initial().to_vec();
    start.sort_unstable();
    start.dedup();

    let mut chain = Antichain::default();
    let mut level: Vec<(StateId, Macro)> = Vec::new();
    for &p in a.initial() {
        if chain.insert(p, &start) {
            level.push((p, start.clone()));
        }
    }
    let mut steps = 0;
    let mut depth = 0;
    loop {
        if level.iter().any(|(p, s)| bad(a, b, *p, s)) {
            break;
        }
        if level.is_empty() {
            return Ok(Inclusion { included: true, witness: None, steps });
        }
        let mut next = Vec::new();
        for (p, s) in &level {
            steps += 1;
            for (_, left, right) in successors(a, b, &[*p], s) {
                for q in left {
                    if chain.insert(q, &right) {
                        next.push((q, right.clone()));
                    }
                }
            }
        }
        level = next;
        depth += 1;
    }

    // Rebuild the lexicographically least witness of length `depth`
    // symbol by symbol, keeping only choices that can still be completed.
    let mut ps: Macro = a.initial().to_vec();
    let mut set = start;
    let mut word = Vec::with_capacity(depth);
    for remaining in (0..depth).rev() {
        let mut regions = successors(a, b, &ps, &set);
        regions.sort_by_key(|r| r.0.min_symbol());
        let (cube, left, right) = regions
            .into_iter()
            .find(|(_, left, right)| completable(a, b, left, right, remaining))
            .expect("a witness of the recorded length exists");
        word.push(cube.min_symbol());
        ps = left;
        set = right;
    }
    Ok(Inclusion { included: false, witness: Some(word), steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::ops::{complement, is_empty, product};
    use crate::automata::testutil::{pred_registry, random_nfa, words};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reflexive_and_universal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a = random_nfa(&mut rng, 2, 4);
            assert!(antichain_included(&a, &a).unwrap().included);
            let u = TrackNfa::universal(a.registry().clone());
            assert!(antichain_included(&a, &u).unwrap().included);
        }
    }

    /// Shortest-lex word of `L(a) \ L(b)` by plain enumeration.
    fn brute_witness(a: &TrackNfa, b: &TrackNfa, max_len: usize) -> Option<Vec<u64>> {
        let w = a.registry().width();
        for len in 0..=max_len {
            let mut ws = words(w, len);
            ws.sort();
            if let Some(x) = ws.into_iter().find(|x| a.accepts(x) && !b.accepts(x)) {
                return Some(x);
            }
        }
        None
    }

    #[test]
    fn agrees_with_complement_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let w = 1 + rng.gen_range(0..3);
            let a = random_nfa(&mut rng, w, 4);
            let b = random_nfa(&mut rng, w, 4);
            let r = antichain_included(&a, &b).unwrap();
            let oracle = is_empty(&product(&a, &complement(&b)).unwrap());
            assert_eq!(r.included, oracle);
            if let Some(wit) = &r.witness {
                assert!(a.accepts(wit) && !b.accepts(wit));
                if wit.len() <= 3 {
                    assert_eq!(Some(wit.clone()), brute_witness(&a, &b, wit.len()));
                }
            }
        }
    }

    #[test]
    fn empty_word_witness() {
        let reg = pred_registry(1);
        let a = TrackNfa::universal(reg.clone());
        let mut b = TrackNfa::new(reg);
        let s = b.add_state(false);
        let t = b.add_state(true);
        b.add_initial(s);
        b.add_edge(s, Cube::FULL, t);
        b.add_edge(t, Cube::FULL, t);
        let r = antichain_included(&a, &b).unwrap();
        assert_eq!(r.witness, Some(vec![]));
    }
}
