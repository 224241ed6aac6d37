//! The parametric trap invariant as an automaton, and safety checks against it.
//!
//! The invariant is never built explicitly. `a_tilde` accepts exactly the
//! markings that leave some initially marked trap empty, so a bad-state
//! automaton whose language is included in `L(a_tilde)` proves the property.

mod report;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automata::{
    antichain_included, decode_word, extend, flip_predicate_tracks, minimize, product, saturate, AutomataError,
    Symbol, Track, TrackNfa, TrackRegistry,
};
use crate::caps::Caps;
use crate::logic::{
    build_decomposability_formula, build_deadlock_formula, build_init_formula, build_size_formula,
    build_trap_constraint, flatten, translate_tr, Formula, TransformError,
};
use crate::model::{ModelError, PropertyKind, PropertySpec, SystemModel};
use crate::petri::{all_trap_valuations, instantiate_net, MarkedPetriNet, Marking, PetriError};
use crate::wss_compile::{compile_with, CompilationTrace, CompileError, CompileOptions};

pub use report::{Stats, Verdict, VerificationReport, WitnessEntry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrapInvError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Petri(#[from] PetriError),
    #[error("property `{property}` mentions `{pred}`, which is not a state predicate")]
    UnknownPredicate { property: String, pred: String },
    #[error("property `{property}` has free symbols: {free}")]
    NotASentence { property: String, free: String },
}

/// Automata of the trap invariant, over one predicate track per state.
#[derive(Debug, Clone)]
pub struct InvariantBundle {
    /// `Tr(Init & Theta)`.
    pub phi: Formula,
    pub a_phi: TrackNfa,
    pub a_sat: TrackNfa,
    /// Flipped saturation; the invariant is its complement.
    pub a_tilde: TrackNfa,
    pub registry: TrackRegistry,
    pub trace: CompilationTrace,
}

fn state_registry(model: &SystemModel) -> Result<TrackRegistry, AutomataError> {
    TrackRegistry::new(model.state_preds().into_iter().map(Track::pred))
}

fn options(caps: &Caps) -> CompileOptions {
    CompileOptions { minimize_threshold: caps.minimize_threshold }
}

/// Compiles a sentence over state predicates and spreads it over every
/// state track of the model.
pub(crate) fn compile_sentence(
    phi: &Formula,
    registry: &TrackRegistry,
    caps: &Caps,
) -> Result<(TrackNfa, CompilationTrace), TrapInvError> {
    let tr = translate_tr(&flatten(phi))?;
    let (a, trace) = compile_with(&tr, options(caps))?;
    Ok((minimize(&extend(&a, registry)?), trace))
}

pub fn build_invariant(model: &SystemModel, caps: &Caps) -> Result<InvariantBundle, TrapInvError> {
    let registry = state_registry(model)?;
    let body = Formula::and(vec![build_init_formula(model), build_trap_constraint(model)?]);
    let phi = translate_tr(&flatten(&body))?;
    let (a_phi, trace) = compile_sentence(&body, &registry, caps)?;
    let preds = registry.all_mask();
    let a_sat = saturate(&a_phi, preds)?;
    let a_tilde = flip_predicate_tracks(&a_sat, preds)?;
    Ok(InvariantBundle { phi, a_phi, a_sat, a_tilde, registry, trace })
}

impl InvariantBundle {
    /// Whether the marking encoded by `word` satisfies the trap invariant.
    pub fn admits(&self, word: &[Symbol]) -> bool {
        !self.a_tilde.accepts(word)
    }
}

/// The bad-state formula of a property, checked to mention state predicates only.
pub fn bad_formula(model: &SystemModel, property: &PropertySpec) -> Result<Formula, TrapInvError> {
    let bad = match &property.kind {
        PropertyKind::Deadlock => build_deadlock_formula(model)?,
        PropertyKind::BadStates(f) => f.clone(),
    };
    let free = bad.free_symbols();
    if let Some(pred) = free.preds.iter().find(|p| !model.is_state_pred(p)) {
        return Err(TrapInvError::UnknownPredicate { property: property.name.clone(), pred: pred.clone() });
    }
    let loose: BTreeSet<&String> = free.vars.iter().chain(&free.consts).chain(&free.sets).collect();
    if !loose.is_empty() {
        let free = loose.into_iter().cloned().collect::<Vec<_>>().join(", ");
        return Err(TrapInvError::NotASentence { property: property.name.clone(), free });
    }
    Ok(bad)
}

/// Automaton of the decomposable bad markings with at least `min_size` indices.
pub fn bad_automaton(
    model: &SystemModel,
    property: &PropertySpec,
    min_size: usize,
    caps: &Caps,
) -> Result<TrackNfa, TrapInvError> {
    let registry = state_registry(model)?;
    let phi = Formula::and(vec![
        build_decomposability_formula(model),
        build_size_formula(min_size),
        bad_formula(model, property)?,
    ]);
    Ok(compile_sentence(&phi, &registry, caps)?.0)
}

fn has_broadcasts(model: &SystemModel) -> bool {
    model.clauses().map(|cs| cs.iter().any(|c| !c.broadcasts.is_empty())).unwrap_or(false)
}

pub(crate) fn base_assumptions(model: &SystemModel, property: &PropertySpec, min_size: usize) -> Vec<String> {
    let mut out = vec![
        format!("every system size n >= {min_size} is covered"),
        "bad states are restricted to markings with exactly one state per component instance".to_string(),
        "the check is one-sided: INCONCLUSIVE does not mean the bad states are reachable".to_string(),
    ];
    if matches!(property.kind, PropertyKind::Deadlock) && has_broadcasts(model) {
        out.push("broadcast interactions fire only when every selected receiver is enabled".to_string());
    }
    out
}

/// Decides `L(bad) ⊆ L(a_tilde)` and packages the outcome.
pub(crate) fn decide(
    model: &SystemModel,
    bundle: &InvariantBundle,
    bad: &TrackNfa,
    property: &PropertySpec,
    min_size: usize,
    windows: Vec<String>,
    assumptions: Vec<String>,
) -> Result<VerificationReport, TrapInvError> {
    let inc = antichain_included(bad, &bundle.a_tilde)?;
    let witness = match &inc.witness {
        Some(w) => Some(witness_entries(model, &bundle.registry, w)?),
        None => None,
    };
    Ok(VerificationReport {
        verdict: if inc.included { Verdict::Safe } else { Verdict::Inconclusive },
        property: property.name.clone(),
        min_size,
        witness,
        stats: Stats {
            states: bad.num_states() + bundle.a_tilde.num_states(),
            transitions: bad.num_transitions() + bundle.a_tilde.num_transitions(),
            inclusion_steps: inc.steps,
        },
        assumptions,
        windows,
    })
}

/// Safety of `property` for every size `n >= min_size` under the trap invariant.
pub fn check_safety(
    model: &SystemModel,
    bundle: &InvariantBundle,
    property: &PropertySpec,
    min_size: usize,
    caps: &Caps,
) -> Result<VerificationReport, TrapInvError> {
    let bad = bad_automaton(model, property, min_size, caps)?;
    decide(model, bundle, &bad, property, min_size, Vec::new(), base_assumptions(model, property, min_size))
}

/// Per-index states of a decomposable word, by index then type order.
pub fn witness_entries(
    model: &SystemModel,
    registry: &TrackRegistry,
    word: &[Symbol],
) -> Result<Vec<WitnessEntry>, TrapInvError> {
    let s = decode_word(word, registry)?;
    let mut out = Vec::new();
    for index in 0..word.len() {
        for c in &model.components {
            for st in &c.states {
                if s.preds.get(&c.state_pred(st)).is_some_and(|bits| bits >> index & 1 == 1) {
                    out.push(WitnessEntry { index, ty: c.name.clone(), state: st.clone() });
                }
            }
        }
    }
    Ok(out)
}

/// Word of a marking of the size-`n` net, one symbol per index.
pub fn word_of_marking(net: &MarkedPetriNet, registry: &TrackRegistry, m: &Marking) -> Vec<Symbol> {
    let mut word = vec![0; net.slots.len()];
    for p in m.marked() {
        let pl = &net.places[p];
        if let Some(j) = registry.index_of(&format!("{}.{}", pl.ty, pl.state)) {
            word[pl.slot] |= 1 << j;
        }
    }
    word
}

fn marking_of_word(net: &MarkedPetriNet, registry: &TrackRegistry, word: &[Symbol]) -> Marking {
    let marked = (0..net.places.len()).filter(|&p| {
        let pl = &net.places[p];
        registry.index_of(&format!("{}.{}", pl.ty, pl.state)).is_some_and(|j| word[pl.slot] >> j & 1 == 1)
    });
    Marking::from_places(net.places.len(), marked)
}

/// Outcome of comparing the automaton-side invariant with the trap
/// invariant of the size-`n` net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    pub n: usize,
    pub automaton: usize,
    pub net: usize,
    /// Markings admitted by exactly one side, at most ten.
    pub differences: Vec<(String, Vec<String>)>,
}

impl OracleOutcome {
    pub fn matches(&self) -> bool {
        self.automaton == self.net && self.differences.is_empty()
    }
}

/// Enumerates all `2^(n * states)` valuations and compares the words outside
/// `L(a_tilde)` with the markings that mark every minimal IMT of the net.
pub fn oracle(model: &SystemModel, bundle: &InvariantBundle, n: usize, caps: &Caps) -> Result<OracleOutcome, TrapInvError> {
    let net = instantiate_net(model, n, caps)?;
    let want: BTreeSet<Marking> = all_trap_valuations(&net, caps.trap_places)?.into_iter().collect();
    let width = bundle.registry.width();
    let bits = width * n;
    if bits > 24 {
        return Err(PetriError::TooManyBits(bits).into());
    }
    let mut got = BTreeSet::new();
    for v in 0u64..1 << bits {
        let word: Vec<Symbol> = (0..n).map(|i| v >> (i * width) & ((1 << width) - 1)).collect();
        if bundle.admits(&word) {
            got.insert(marking_of_word(&net, &bundle.registry, &word));
        }
    }
    let mut differences = Vec::new();
    for (side, m) in got.difference(&want).map(|m| ("automaton only", m)).chain(want.difference(&got).map(|m| ("net only", m))) {
        if differences.len() < 10 {
            differences.push((side.to_string(), net.marking_names(m)));
        }
    }
    Ok(OracleOutcome { n, automaton: got.len(), net: want.len(), differences })
}

/// Restricts `a` to the markings of `b` as well; used to strengthen bad sets.
pub(crate) fn intersect(a: &TrackNfa, b: &TrackNfa) -> Result<TrackNfa, TrapInvError> {
    Ok(minimize(&product(a, b)?))
}
