//! Fixed-size semantics: the 1-safe marked Petri net of a system with `n`
//! instances per component type, its reachable markings and its traps.

mod boolean;
mod dot;
mod instantiate;
mod reach;
mod traps;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::logic::EvalError;
use crate::model::ModelError;

pub use boolean::{booleanize, pos, Prop, PropVar};
pub use instantiate::{instantiate_net, minimal_models, minimal_models_bruteforce, PortModel};
pub use reach::reachable_markings;
pub use traps::{
    all_trap_valuations, enumerate_min_imts, is_trap, marks_all, min_imts_exhaustive, place_var, trap_constraint_prop,
    Trap,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PetriError {
    #[error("net size {n} exceeds the cap {cap} (raise net_size)")]
    NetTooLarge { n: usize, cap: usize },
    #[error("net size must be at least 1")]
    EmptyNet,
    #[error("brute-force enumeration over {0} bits is too large")]
    TooManyBits(usize),
    #[error("firing `{transition}` puts a second token on `{place}`")]
    NotOneSafe { transition: String, place: String },
    #[error("reachable marking {0} is not decomposable")]
    NotDecomposable(String),
    #[error("more than {0} reachable markings (raise markings)")]
    MarkingCap(usize),
    #[error("trap enumeration over {places} places exceeds the cap {cap} (raise trap_places)")]
    TrapCap { places: usize, cap: usize },
    #[error("DNF exceeds {0} cubes (raise dnf)")]
    DnfCap(usize),
    #[error("set quantifier expansion over {0} positions is too large")]
    SetExpansion(usize),
    #[error("formula is not a sentence: {0}")]
    NotASentence(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Set of marked places.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking {
    words: Vec<u64>,
}

impl Marking {
    pub fn empty(places: usize) -> Marking {
        Marking { words: vec![0; places.div_ceil(64).max(1)] }
    }

    pub fn from_places(places: usize, marked: impl IntoIterator<Item = usize>) -> Marking {
        let mut m = Marking::empty(places);
        for p in marked {
            m.set(p, true);
        }
        m
    }

    pub fn get(&self, p: usize) -> bool {
        self.words[p / 64] >> (p % 64) & 1 == 1
    }

    pub fn set(&mut self, p: usize, v: bool) {
        if v {
            self.words[p / 64] |= 1 << (p % 64);
        } else {
            self.words[p / 64] &= !(1 << (p % 64));
        }
    }

    pub fn marked(&self) -> impl Iterator<Item = usize> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(w, &bits)| (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b))
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Place `(state, slot)` of a component type. Slots are instance indices
/// for fixed-size nets and window constants for view nets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Place {
    pub ty: String,
    pub state: String,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetTransition {
    pub pre: Vec<usize>,
    pub post: Vec<usize>,
    /// The port atoms (minimal model or view disjunct) it comes from.
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPetriNet {
    pub places: Vec<Place>,
    /// Display names of the slots.
    pub slots: Vec<String>,
    pub transitions: Vec<NetTransition>,
    pub initial: Marking,
    index: HashMap<(String, String, usize), usize>,
}

impl MarkedPetriNet {
    pub fn new(places: Vec<Place>, slots: Vec<String>, transitions: Vec<NetTransition>, initial: Marking) -> Self {
        let index = places.iter().enumerate().map(|(i, p)| ((p.ty.clone(), p.state.clone(), p.slot), i)).collect();
        MarkedPetriNet { places, slots, transitions, initial, index }
    }

    pub fn place_index(&self, ty: &str, state: &str, slot: usize) -> Option<usize> {
        self.index.get(&(ty.to_string(), state.to_string(), slot)).copied()
    }

    /// `Type.state@slot`.
    pub fn place_name(&self, p: usize) -> String {
        let pl = &self.places[p];
        format!("{}.{}@{}", pl.ty, pl.state, self.slots[pl.slot])
    }

    pub fn marking_names(&self, m: &Marking) -> Vec<String> {
        m.marked().map(|p| self.place_name(p)).collect()
    }

    /// Marking from place names; unknown names are ignored by returning `None`.
    pub fn marking_of(&self, names: &[&str]) -> Option<Marking> {
        let mut m = Marking::empty(self.places.len());
        for name in names {
            let p = (0..self.places.len()).find(|&p| self.place_name(p) == *name)?;
            m.set(p, true);
        }
        Some(m)
    }

    /// Places grouped by `(type, slot)`; a decomposable marking marks
    /// exactly one place per group.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<(String, usize)> = Vec::new();
        let mut groups: HashMap<(String, usize), Vec<usize>> = HashMap::new();
        for (i, p) in self.places.iter().enumerate() {
            let key = (p.ty.clone(), p.slot);
            if !groups.contains_key(&key) {
                order.push(key.clone());
            }
            groups.entry(key).or_default().push(i);
        }
        order.into_iter().map(|k| groups.remove(&k).unwrap()).collect()
    }

    pub fn is_decomposable(&self, m: &Marking) -> bool {
        self.groups().iter().all(|g| g.iter().filter(|&&p| m.get(p)).count() == 1)
    }

    pub fn enabled(&self, m: &Marking, t: usize) -> bool {
        self.transitions[t].pre.iter().all(|&p| m.get(p))
    }

    /// Fires `t` in `m`; `Err` names the place receiving a second token.
    pub fn fire(&self, m: &Marking, t: usize) -> Result<Marking, PetriError> {
        let tr = &self.transitions[t];
        let mut next = m.clone();
        for &p in &tr.pre {
            next.set(p, false);
        }
        for &p in &tr.post {
            if next.get(p) {
                return Err(PetriError::NotOneSafe { transition: tr.label.clone(), place: self.place_name(p) });
            }
            next.set(p, true);
        }
        Ok(next)
    }

    pub fn is_deadlock(&self, m: &Marking) -> bool {
        !(0..self.transitions.len()).any(|t| self.enabled(m, t))
    }
}

impl fmt::Display for MarkedPetriNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "places: {}", (0..self.places.len()).map(|p| self.place_name(p)).collect::<Vec<_>>().join(" "))?;
        for t in &self.transitions {
            let pre: Vec<String> = t.pre.iter().map(|&p| self.place_name(p)).collect();
            let post: Vec<String> = t.post.iter().map(|&p| self.place_name(p)).collect();
            writeln!(f, "{}: {} -> {}", t.label, pre.join(" "), post.join(" "))?;
        }
        write!(f, "initial: {}", self.marking_names(&self.initial).join(" "))
    }
}
