//! Finite automata over bit-track alphabets.
//!
//! A symbol is a `u64` whose bit `i` is the value of track `i` of the
//! registry. Transitions are labeled by cubes (value/mask pairs), so a
//! single edge can stand for many symbols.

mod dd;
mod dot;
mod encode;
mod inclusion;
mod ops;

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use encode::{decode_word, encode_structure};
pub use inclusion::{antichain_included, Inclusion};
pub use ops::{
    combine, complement, determinize, extend, flip_predicate_tracks, is_empty, membership, minimize, product, project_track,
    saturate, union,
};

pub type Symbol = u64;
pub type StateId = u32;

/// Most tracks a registry can hold (one bit per track in a `u64`).
pub const MAX_TRACKS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("registries differ: [{0}] vs [{1}]")]
    RegistryMismatch(String, String),
    #[error("unknown track `{0}`")]
    UnknownTrack(String),
    #[error("track `{0}` is not a predicate track")]
    NotPredicate(String),
    #[error("track `{0}` declared with two different kinds")]
    DuplicateTrack(String),
    #[error("more than {MAX_TRACKS} tracks")]
    TooManyTracks,
    #[error("registry [{0}] is not contained in [{1}]")]
    NotASubRegistry(String, String),
    #[error("structure does not interpret `{0}`")]
    MissingInterpretation(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TrackKind {
    FirstOrder,
    Predicate,
    SetVar,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Track {
    pub kind: TrackKind,
    pub name: String,
}

impl Track {
    pub fn fo(name: impl Into<String>) -> Track {
        Track { kind: TrackKind::FirstOrder, name: name.into() }
    }

    pub fn pred(name: impl Into<String>) -> Track {
        Track { kind: TrackKind::Predicate, name: name.into() }
    }

    pub fn set(name: impl Into<String>) -> Track {
        Track { kind: TrackKind::SetVar, name: name.into() }
    }
}

/// Ordered track list: first-order variables, then predicates, then set
/// variables, each group sorted by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TrackRegistry {
    tracks: Vec<Track>,
}

impl TrackRegistry {
    pub fn new(tracks: impl IntoIterator<Item = Track>) -> Result<TrackRegistry, AutomataError> {
        let mut tracks: Vec<Track> = tracks.into_iter().collect();
        tracks.sort();
        tracks.dedup();
        for w in tracks.windows(2) {
            if w[0].name == w[1].name {
                return Err(AutomataError::DuplicateTrack(w[0].name.clone()));
            }
        }
        let mut names: Vec<&str> = tracks.iter().map(|t| t.name.as_str()).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(AutomataError::DuplicateTrack(w[0].to_string()));
            }
        }
        if tracks.len() > MAX_TRACKS {
            return Err(AutomataError::TooManyTracks);
        }
        Ok(TrackRegistry { tracks })
    }

    pub fn empty() -> TrackRegistry {
        TrackRegistry::default()
    }

    pub fn width(&self) -> usize {
        self.tracks.len()
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.tracks.iter().position(|t| t.name == name)
    }

    pub fn track(&self, i: usize) -> &Track {
        &self.tracks[i]
    }

    pub fn union(&self, other: &TrackRegistry) -> Result<TrackRegistry, AutomataError> {
        TrackRegistry::new(self.tracks.iter().chain(&other.tracks).cloned())
    }

    pub fn without(&self, name: &str) -> Result<TrackRegistry, AutomataError> {
        if self.index_of(name).is_none() {
            return Err(AutomataError::UnknownTrack(name.to_string()));
        }
        Ok(TrackRegistry { tracks: self.tracks.iter().filter(|t| t.name != name).cloned().collect() })
    }

    /// Bits of all tracks of the given kind.
    pub fn kind_mask(&self, kind: TrackKind) -> u64 {
        self.tracks.iter().enumerate().filter(|(_, t)| t.kind == kind).fold(0, |m, (i, _)| m | (1 << i))
    }

    /// Bits of the named predicate tracks.
    pub fn predicate_mask(&self, names: &[String]) -> Result<u64, AutomataError> {
        let mut m = 0;
        for n in names {
            let i = self.index_of(n).ok_or_else(|| AutomataError::UnknownTrack(n.clone()))?;
            if self.tracks[i].kind != TrackKind::Predicate {
                return Err(AutomataError::NotPredicate(n.clone()));
            }
            m |= 1 << i;
        }
        Ok(m)
    }

    pub fn all_mask(&self) -> u64 {
        width_mask(self.width())
    }

    pub fn names(&self) -> Vec<&str> {
        self.tracks.iter().map(|t| t.name.as_str()).collect()
    }
}

impl fmt::Display for TrackRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.names().join(", "))
    }
}

pub(crate) fn width_mask(w: usize) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1u64 << w) - 1
    }
}

/// The set of symbols agreeing with `value` on the bits of `mask`.
/// Bits outside `mask` are kept zero in `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub value: u64,
    pub mask: u64,
}

impl Cube {
    pub const FULL: Cube = Cube { value: 0, mask: 0 };

    pub fn new(value: u64, mask: u64) -> Cube {
        Cube { value: value & mask, mask }
    }

    /// Adds the constraint "bit `i` equals `v`".
    pub fn with(self, i: usize, v: bool) -> Cube {
        Cube { value: (self.value & !(1 << i)) | ((v as u64) << i), mask: self.mask | (1 << i) }
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        (sym ^ self.value) & self.mask == 0
    }

    pub fn intersect(&self, other: &Cube) -> Option<Cube> {
        if (self.value ^ other.value) & self.mask & other.mask != 0 {
            None
        } else {
            Some(Cube { value: self.value | other.value, mask: self.mask | other.mask })
        }
    }

    /// Every symbol of `self` is in `other`.
    pub fn is_subset_of(&self, other: &Cube) -> bool {
        other.mask & !self.mask == 0 && (self.value ^ other.value) & other.mask == 0
    }

    /// Least symbol of the cube, reading symbols as integers.
    pub fn min_symbol(&self) -> Symbol {
        self.value
    }

    /// Per-track rendering, track 0 first: `1`, `0` or `-`.
    pub fn render(&self, width: usize) -> String {
        (0..width)
            .map(|i| {
                if self.mask >> i & 1 == 0 {
                    '-'
                } else if self.value >> i & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

/// Nondeterministic automaton with cube-labeled transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackNfa {
    registry: TrackRegistry,
    initial: Vec<StateId>,
    finals: Vec<bool>,
    edges: Vec<Vec<(Cube, StateId)>>,
    /// Known to be deterministic and complete.
    dfa: bool,
}

impl TrackNfa {
    pub fn new(registry: TrackRegistry) -> TrackNfa {
        TrackNfa { registry, initial: Vec::new(), finals: Vec::new(), edges: Vec::new(), dfa: false }
    }

    /// Accepts every word, including the empty one.
    pub fn universal(registry: TrackRegistry) -> TrackNfa {
        let mut a = TrackNfa::new(registry);
        let s = a.add_state(true);
        a.add_initial(s);
        a.add_edge(s, Cube::FULL, s);
        a.dfa = true;
        a
    }

    /// Accepts nothing.
    pub fn empty_language(registry: TrackRegistry) -> TrackNfa {
        let mut a = TrackNfa::new(registry);
        let s = a.add_state(false);
        a.add_initial(s);
        a.add_edge(s, Cube::FULL, s);
        a.dfa = true;
        a
    }

    pub fn add_state(&mut self, is_final: bool) -> StateId {
        self.finals.push(is_final);
        self.edges.push(Vec::new());
        self.dfa = false;
        (self.finals.len() - 1) as StateId
    }

    pub fn add_initial(&mut self, s: StateId) {
        if !self.initial.contains(&s) {
            self.initial.push(s);
            self.initial.sort_unstable();
        }
        self.dfa = false;
    }

    pub fn add_edge(&mut self, from: StateId, cube: Cube, to: StateId) {
        let all = self.registry.all_mask();
        assert!(cube.mask & !all == 0, "cube wider than registry");
        assert!((to as usize) < self.finals.len() && (from as usize) < self.finals.len());
        self.edges[from as usize].push((Cube::new(cube.value, cube.mask), to));
        self.dfa = false;
    }

    pub fn set_final(&mut self, s: StateId, is_final: bool) {
        self.finals[s as usize] = is_final;
    }

    pub fn registry(&self) -> &TrackRegistry {
        &self.registry
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals[s as usize]
    }

    pub fn edges(&self, s: StateId) -> &[(Cube, StateId)] {
        &self.edges[s as usize]
    }

    pub fn transitions(&self) -> Vec<(StateId, Cube, StateId)> {
        let mut out = Vec::new();
        for (s, es) in self.edges.iter().enumerate() {
            for &(c, t) in es {
                out.push((s as StateId, c, t));
            }
        }
        out
    }

    /// Known to be deterministic and complete (set by the constructions that guarantee it).
    pub fn is_complete_dfa(&self) -> bool {
        self.dfa
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let n = self.num_states();
        let mut cur = vec![false; n];
        for &s in &self.initial {
            cur[s as usize] = true;
        }
        for &sym in word {
            let mut next = vec![false; n];
            let mut any = false;
            for s in 0..n {
                if cur[s] {
                    for &(c, t) in &self.edges[s] {
                        if c.contains(sym) {
                            next[t as usize] = true;
                            any = true;
                        }
                    }
                }
            }
            if !any {
                return false;
            }
            cur = next;
        }
        (0..n).any(|s| cur[s] && self.finals[s])
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &s in &self.initial {
            if !seen[s as usize] {
                seen[s as usize] = true;
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            for &(_, t) in &self.edges[s as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    pub fn is_empty(&self) -> bool {
        let seen = self.reachable();
        !(0..self.num_states()).any(|s| seen[s] && self.finals[s])
    }

    /// Drops states that are unreachable or cannot reach a final state.
    pub fn trim(&self) -> TrackNfa {
        let fwd = self.reachable();
        let n = self.num_states();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (s, es) in self.edges.iter().enumerate() {
            for &(_, t) in es {
                rev[t as usize].push(s as StateId);
            }
        }
        let mut bwd = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| self.finals[s]).collect();
        for &s in &queue {
            bwd[s] = true;
        }
        while let Some(s) = queue.pop_front() {
            for &p in &rev[s] {
                if !bwd[p as usize] {
                    bwd[p as usize] = true;
                    queue.push_back(p as usize);
                }
            }
        }
        let keep: Vec<bool> = (0..n).map(|s| fwd[s] && bwd[s]).collect();
        let mut map = vec![u32::MAX; n];
        let mut out = TrackNfa::new(self.registry.clone());
        for s in 0..n {
            if keep[s] {
                map[s] = out.add_state(self.finals[s]);
            }
        }
        for &s in &self.initial {
            if keep[s as usize] {
                out.add_initial(map[s as usize]);
            }
        }
        for s in 0..n {
            if keep[s] {
                for &(c, t) in &self.edges[s] {
                    if keep[t as usize] {
                        out.add_edge(map[s], c, map[t as usize]);
                    }
                }
            }
        }
        out
    }

    fn check_same_registry(&self, other: &TrackNfa) -> Result<(), AutomataError> {
        if self.registry != other.registry {
            return Err(AutomataError::RegistryMismatch(self.registry.to_string(), other.registry.to_string()));
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;

    /// All words of exactly length `len` over `width` tracks.
    pub fn words(width: usize, len: usize) -> Vec<Vec<Symbol>> {
        let alpha = 1u64 << width;
        let total = alpha.pow(len as u32);
        (0..total)
            .map(|mut k| {
                let mut w = Vec::with_capacity(len);
                for _ in 0..len {
                    w.push(k % alpha);
                    k /= alpha;
                }
                w
            })
            .collect()
    }

    pub fn words_up_to(width: usize, max_len: usize) -> Vec<Vec<Symbol>> {
        (0..=max_len).flat_map(|l| words(width, l)).collect()
    }

    pub fn pred_registry(width: usize) -> TrackRegistry {
        TrackRegistry::new((0..width).map(|i| Track::pred(format!("p{i}")))).unwrap()
    }

    /// A random NFA with cube labels.
    pub fn random_nfa(rng: &mut impl Rng, width: usize, max_states: usize) -> TrackNfa {
        let reg = pred_registry(width);
        let mut a = TrackNfa::new(reg);
        let n = rng.gen_range(1..=max_states);
        for _ in 0..n {
            let f = rng.gen_bool(0.3);
            a.add_state(f);
        }
        a.add_initial(0);
        if n > 1 && rng.gen_bool(0.2) {
            a.add_initial(rng.gen_range(1..n) as StateId);
        }
        let all = width_mask(width);
        let m = rng.gen_range(n..=3 * n);
        for _ in 0..m {
            let s = rng.gen_range(0..n) as StateId;
            let t = rng.gen_range(0..n) as StateId;
            let mask = rng.gen::<u64>() & all;
            let value = rng.gen::<u64>() & mask;
            a.add_edge(s, Cube::new(value, mask), t);
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_orders_by_kind_then_name() {
        let r = TrackRegistry::new([Track::set("X"), Track::pred("b"), Track::fo("y"), Track::pred("a"), Track::fo("x")])
            .unwrap();
        assert_eq!(r.names(), vec!["x", "y", "a", "b", "X"]);
        assert_eq!(r.kind_mask(TrackKind::Predicate), 0b01100);
        assert!(matches!(
            TrackRegistry::new([Track::fo("a"), Track::pred("a")]),
            Err(AutomataError::DuplicateTrack(_))
        ));
    }

    #[test]
    fn cube_basics() {
        let c = Cube::new(0b01, 0b11);
        assert!(c.contains(0b101));
        assert!(!c.contains(0b10));
        assert_eq!(c.intersect(&Cube::new(0b10, 0b10)), None);
        assert_eq!(c.intersect(&Cube::new(0b100, 0b100)), Some(Cube::new(0b101, 0b111)));
        assert!(Cube::new(0b101, 0b111).is_subset_of(&c));
        assert_eq!(c.render(3), "10-");
    }

    #[test]
    fn membership_and_emptiness() {
        let reg = TrackRegistry::new([Track::pred("p")]).unwrap();
        let mut a = TrackNfa::new(reg.clone());
        let s0 = a.add_state(false);
        let s1 = a.add_state(true);
        a.add_initial(s0);
        a.add_edge(s0, Cube::new(1, 1), s1);
        assert!(a.accepts(&[1]));
        assert!(!a.accepts(&[0]));
        assert!(!a.accepts(&[1, 1]));
        assert!(!a.is_empty());
        assert!(TrackNfa::empty_language(reg.clone()).is_empty());
        assert!(TrackNfa::universal(reg).accepts(&[]));
    }

    #[test]
    fn trim_removes_dead_states() {
        let reg = TrackRegistry::new([Track::pred("p")]).unwrap();
        let mut a = TrackNfa::new(reg);
        let s0 = a.add_state(false);
        let s1 = a.add_state(true);
        let dead = a.add_state(false);
        let _unreachable = a.add_state(true);
        a.add_initial(s0);
        a.add_edge(s0, Cube::FULL, s1);
        a.add_edge(s0, Cube::FULL, dead);
        let t = a.trim();
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.num_transitions(), 1);
    }

    mod cube_laws {
        use super::*;
        use proptest::prelude::*;

        fn cube() -> impl Strategy<Value = Cube> {
            (0u64..16, 0u64..16).prop_map(|(v, m)| Cube::new(v, m))
        }

        proptest! {
            #[test]
            fn intersection_is_conjunction(a in cube(), b in cube()) {
                let i = a.intersect(&b);
                for s in 0u64..16 {
                    let both = a.contains(s) && b.contains(s);
                    prop_assert_eq!(i.is_some_and(|c| c.contains(s)), both);
                }
            }

            #[test]
            fn subset_matches_members(a in cube(), b in cube()) {
                let members = (0u64..16).all(|s| !a.contains(s) || b.contains(s));
                prop_assert_eq!(a.is_subset_of(&b), members);
            }
        }
    }
}
