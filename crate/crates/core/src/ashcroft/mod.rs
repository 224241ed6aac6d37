//! Ashcroft invariants: a window of typed constants cuts a finite view out of
//! the system; the view's reachable markings, generalized over every
//! placement of the window, strengthen the trap invariant.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::automata::{is_empty, AutomataError};
use crate::caps::Caps;
use crate::frontend::format_formula;
use crate::logic::{flatten, translate_tr, Formula, Gensym, Term, TransformError};
use crate::model::{port_pre_post, Clause, ModelError, PortRule, PropertySpec, SystemModel, WindowSpec};
use crate::petri::{reachable_markings, Marking, MarkedPetriNet, NetTransition, PetriError, Place};
use crate::trapinv::{
    bad_automaton, base_assumptions, compile_sentence, decide, InvariantBundle, TrapInvError, VerificationReport,
};
use crate::wss_compile::{compile_with, CompileError, CompileOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AshcroftError {
    #[error(transparent)]
    TrapInv(#[from] TrapInvError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Petri(#[from] PetriError),
    #[error("interaction has broadcasts; windows need a purely existential interaction")]
    NotExistential,
    #[error("window `{window}` overlaps with `{instance}`")]
    Overlapping { window: String, instance: String },
    #[error("unknown window `{0}`")]
    UnknownWindow(String),
}

impl From<CompileError> for AshcroftError {
    fn from(e: CompileError) -> Self {
        AshcroftError::TrapInv(e.into())
    }
}

impl From<TransformError> for AshcroftError {
    fn from(e: TransformError) -> Self {
        AshcroftError::TrapInv(e.into())
    }
}

impl From<AutomataError> for AshcroftError {
    fn from(e: AutomataError) -> Self {
        AshcroftError::TrapInv(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entailment {
    /// `psi |= phi`.
    Holds,
    /// `psi |= !phi`.
    Refuted,
    Overlapping,
}

/// One clause with each port atom either placed on a window constant of
/// the port's type or kept outside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub clause: usize,
    /// Port and its constant, `None` for atoms outside the window.
    pub atoms: Vec<(String, Option<String>)>,
    pub formula: Formula,
    pub entailment: Entailment,
}

impl Instance {
    /// The ground port atoms inside the window.
    pub fn inside(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> =
            self.atoms.iter().filter_map(|(p, c)| c.as_ref().map(|c| (p.clone(), c.clone()))).collect();
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowCheck {
    pub window: String,
    pub instances: Vec<Instance>,
}

impl WindowCheck {
    pub fn is_valid(&self) -> bool {
        self.instances.iter().all(|i| i.entailment != Entailment::Overlapping)
    }

    pub fn first_overlap(&self) -> Option<&Instance> {
        self.instances.iter().find(|i| i.entailment == Entailment::Overlapping)
    }
}

fn satisfiable(phi: &Formula, caps: &Caps) -> Result<bool, AshcroftError> {
    let tr = translate_tr(&flatten(phi))?;
    let (a, _) = compile_with(&tr, CompileOptions { minimize_threshold: caps.minimize_threshold })?;
    Ok(!is_empty(&a))
}

fn existential_clauses(model: &SystemModel) -> Result<Vec<Clause>, AshcroftError> {
    let clauses = model.clauses()?;
    if clauses.iter().any(|c| !c.broadcasts.is_empty()) {
        return Err(AshcroftError::NotExistential);
    }
    Ok(clauses)
}

/// `exists vars. guard & t_j = c_j (placed) & t_j != c (outside, same-type c)`.
fn instance_formula(model: &SystemModel, w: &WindowSpec, clause: &Clause, placed: &[Option<usize>]) -> Formula {
    let mut parts = clause.guards.clone();
    for (a, slot) in clause.ports.iter().zip(placed) {
        match slot {
            Some(u) => parts.push(Formula::Eq(a.term.clone(), Term::constant(w.constants[*u].0.clone()))),
            None => {
                let ty = model.port_owner(&a.port).map(|c| c.name.as_str());
                for (c, cty) in &w.constants {
                    if Some(cty.as_str()) == ty {
                        parts.push(Formula::neq(a.term.clone(), Term::constant(c.clone())));
                    }
                }
            }
        }
    }
    clause.vars.iter().rev().fold(Formula::and(parts), |acc, v| Formula::exists(v.clone(), acc))
}

/// Decides, for every clause instance with at least one atom in the window,
/// whether the window constraint entails it or its negation. Instances with
/// every atom outside are skipped; they could only add all-true disjuncts
/// to the view.
pub fn check_window(model: &SystemModel, w: &WindowSpec, caps: &Caps) -> Result<WindowCheck, AshcroftError> {
    let clauses = existential_clauses(model)?;
    let psi = &w.constraint;
    let mut instances = Vec::new();
    for (ci, clause) in clauses.iter().enumerate() {
        let choices: Vec<Vec<Option<usize>>> = clause
            .ports
            .iter()
            .map(|a| {
                let ty = model.port_owner(&a.port).map(|c| c.name.clone());
                let mut v: Vec<Option<usize>> = vec![None];
                v.extend((0..w.constants.len()).filter(|&u| Some(&w.constants[u].1) == ty.as_ref()).map(Some));
                v
            })
            .collect();
        let total: usize = choices.iter().map(Vec::len).product();
        for code in 0..total {
            let mut c = code;
            let placed: Vec<Option<usize>> = choices
                .iter()
                .map(|ch| {
                    let x = ch[c % ch.len()];
                    c /= ch.len();
                    x
                })
                .collect();
            if placed.iter().all(Option::is_none) {
                continue;
            }
            let phi = instance_formula(model, w, clause, &placed);
            let with = satisfiable(&Formula::and(vec![psi.clone(), phi.clone()]), caps)?;
            let without = satisfiable(&Formula::and(vec![psi.clone(), Formula::not(phi.clone())]), caps)?;
            let entailment = match (with, without) {
                (_, false) => Entailment::Holds,
                (false, true) => Entailment::Refuted,
                (true, true) => Entailment::Overlapping,
            };
            let atoms = clause
                .ports
                .iter()
                .zip(&placed)
                .map(|(a, s)| (a.port.clone(), s.map(|u| w.constants[u].0.clone())))
                .collect();
            instances.push(Instance { clause: ci, atoms, formula: phi, entailment });
        }
    }
    Ok(WindowCheck { window: w.name.clone(), instances })
}

/// Ground interaction of a window: each disjunct is a set of `(port, constant)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct View {
    pub window: String,
    pub constants: Vec<(String, String)>,
    pub disjuncts: Vec<Vec<(String, String)>>,
}

impl View {
    pub fn to_formula(&self) -> Formula {
        Formula::or(
            self.disjuncts
                .iter()
                .map(|d| Formula::and(d.iter().map(|(p, c)| Formula::pred(p.clone(), Term::constant(c.clone()))).collect()))
                .collect(),
        )
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disjuncts.is_empty() {
            return f.write_str("false");
        }
        let ds: Vec<String> = self
            .disjuncts
            .iter()
            .map(|d| d.iter().map(|(p, c)| format!("{p}({c})")).collect::<Vec<_>>().join(" & "))
            .collect();
        write!(f, "({})", ds.join(") | ("))
    }
}

/// The view of the interaction through a checked window: one disjunct per
/// entailed instance, keeping the atoms placed inside the window.
pub fn build_view(w: &WindowSpec, check: &WindowCheck) -> Result<View, AshcroftError> {
    if let Some(i) = check.first_overlap() {
        return Err(AshcroftError::Overlapping { window: w.name.clone(), instance: format_formula(&i.formula) });
    }
    let set: BTreeSet<Vec<(String, String)>> =
        check.instances.iter().filter(|i| i.entailment == Entailment::Holds).map(Instance::inside).collect();
    Ok(View { window: w.name.clone(), constants: w.constants.clone(), disjuncts: set.into_iter().collect() })
}

/// The 1-safe net of a view: places `(state, constant)`, one transition per
/// disjunct whose ports all have rules.
pub fn view_net(model: &SystemModel, view: &View) -> Result<MarkedPetriNet, AshcroftError> {
    let mut places = Vec::new();
    let mut initial = Vec::new();
    for (slot, (_, ty)) in view.constants.iter().enumerate() {
        let comp = model.component(ty).ok_or_else(|| ModelError::UnknownType(ty.clone()))?;
        for s in &comp.states {
            if *s == comp.initial {
                initial.push(places.len());
            }
            places.push(Place { ty: ty.clone(), state: s.clone(), slot });
        }
    }
    let slots: Vec<String> = view.constants.iter().map(|(c, _)| c.clone()).collect();
    let find = |ty: &str, state: &str, c: &str| {
        let slot = slots.iter().position(|s| s == c)?;
        places.iter().position(|p| p.ty == ty && p.state == state && p.slot == slot)
    };
    let mut transitions = Vec::new();
    'disjunct: for d in &view.disjuncts {
        let (mut pre, mut post) = (Vec::new(), Vec::new());
        for (port, c) in d {
            match port_pre_post(model, port)? {
                PortRule::Rule { component, source, target } => {
                    pre.extend(find(&component, &source, c));
                    post.extend(find(&component, &target, c));
                }
                PortRule::NoRule { .. } => continue 'disjunct,
            }
        }
        pre.sort_unstable();
        pre.dedup();
        post.sort_unstable();
        post.dedup();
        let label = d.iter().map(|(p, c)| format!("{p}({c})")).collect::<Vec<_>>().join(" ");
        transitions.push(NetTransition { pre, post, label });
    }
    let n = places.len();
    Ok(MarkedPetriNet::new(places, slots, transitions, Marking::from_places(n, initial)))
}

#[derive(Debug, Clone)]
pub struct ViewReach {
    pub net: MarkedPetriNet,
    pub markings: Vec<Marking>,
    /// One conjunction of positive state atoms per reachable marking.
    pub formula: Formula,
}

impl ViewReach {
    /// Each disjunct as a sorted list of `Type.state(constant)`.
    pub fn disjuncts(&self) -> Vec<Vec<String>> {
        self.markings
            .iter()
            .map(|m| {
                let mut v: Vec<String> = m
                    .marked()
                    .map(|p| {
                        let pl = &self.net.places[p];
                        format!("{}.{}({})", pl.ty, pl.state, self.net.slots[pl.slot])
                    })
                    .collect();
                v.sort();
                v
            })
            .collect()
    }
}

pub fn view_reach_formula(model: &SystemModel, view: &View, caps: &Caps) -> Result<ViewReach, AshcroftError> {
    let net = view_net(model, view)?;
    let markings = reachable_markings(&net, caps.markings, true)?;
    let formula = Formula::or(
        markings
            .iter()
            .map(|m| {
                Formula::and(
                    m.marked()
                        .map(|p| {
                            let pl = &net.places[p];
                            Formula::pred(format!("{}.{}", pl.ty, pl.state), Term::constant(net.slots[pl.slot].clone()))
                        })
                        .collect(),
                )
            })
            .collect(),
    );
    Ok(ViewReach { net, markings, formula })
}

/// `forall x1..xw. psi(x) -> reach(x)`.
pub fn ashcroft_invariant(w: &WindowSpec, reach: &Formula) -> Formula {
    let mut gen = Gensym::for_formula(&Formula::and(vec![w.constraint.clone(), reach.clone()]));
    let vars: Vec<String> = w.constants.iter().map(|(c, _)| gen.fresh(c)).collect();
    let mut psi = w.constraint.clone();
    let mut body = reach.clone();
    for ((c, _), x) in w.constants.iter().zip(&vars) {
        psi = psi.substitute_const(c, &Term::var(x.clone()));
        body = body.substitute_const(c, &Term::var(x.clone()));
    }
    vars.iter().rev().fold(Formula::implies(psi, body), |acc, x| Formula::forall(x.clone(), acc))
}

/// Everything derived from one window.
#[derive(Debug, Clone)]
pub struct WindowOutcome {
    pub check: WindowCheck,
    pub view: View,
    pub reach: ViewReach,
    pub invariant: Formula,
}

pub fn analyze_window(model: &SystemModel, w: &WindowSpec, caps: &Caps) -> Result<WindowOutcome, AshcroftError> {
    let check = check_window(model, w, caps)?;
    let view = build_view(w, &check)?;
    let reach = view_reach_formula(model, &view, caps)?;
    let invariant = ashcroft_invariant(w, &reach.formula);
    Ok(WindowOutcome { check, view, reach, invariant })
}

/// Checks `property` against the trap invariant strengthened by the
/// Ashcroft invariants of `windows`.
pub fn strengthen_and_check(
    model: &SystemModel,
    bundle: &InvariantBundle,
    property: &PropertySpec,
    windows: &[WindowSpec],
    min_size: usize,
    caps: &Caps,
) -> Result<(VerificationReport, Vec<WindowOutcome>), AshcroftError> {
    let mut outcomes = Vec::new();
    for w in windows {
        outcomes.push(analyze_window(model, w, caps)?);
    }
    let mut bad = bad_automaton(model, property, min_size, caps)?;
    if !outcomes.is_empty() {
        let ai = Formula::and(outcomes.iter().map(|o| o.invariant.clone()).collect());
        let (a_ai, _) = compile_sentence(&ai, &bundle.registry, caps)?;
        bad = crate::trapinv::intersect(&bad, &a_ai)?;
    }
    let mut assumptions = base_assumptions(model, property, min_size);
    if windows.iter().any(|w| w.name == AUTO_WINDOW) {
        assumptions.push(format!("window `{AUTO_WINDOW}` was proposed by the adjacent-triple heuristic"));
    }
    let names = windows.iter().map(|w| w.name.clone()).collect();
    let report = decide(model, bundle, &bad, property, min_size, names, assumptions)?;
    Ok((report, outcomes))
}

pub const AUTO_WINDOW: &str = "auto";

/// Heuristic window: two instances of a type `A` around the instance of type
/// `B` that `A` reaches through `succ` in some clause, kept away from index 0:
/// `exists z. inf(z) & z < c1 & c1 < c2 & c2 = succ(c1) & c2 = c3`.
/// Returns the first candidate that passes [`check_window`].
pub fn auto_window(model: &SystemModel, caps: &Caps) -> Result<Option<WindowSpec>, AshcroftError> {
    let clauses = existential_clauses(model)?;
    let mut tried = BTreeSet::new();
    for clause in &clauses {
        for a in clause.ports.iter().filter(|a| a.term.succs == 0) {
            for b in clause.ports.iter().filter(|b| b.term.succs == 1 && b.term.base == a.term.base) {
                let (Some(ta), Some(tb)) = (model.port_owner(&a.port), model.port_owner(&b.port)) else {
                    continue;
                };
                if ta.name == tb.name || !tried.insert((ta.name.clone(), tb.name.clone())) {
                    continue;
                }
                let w = adjacent_triple(&ta.name, &tb.name);
                if check_window(model, &w, caps)?.is_valid() {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

fn adjacent_triple(a: &str, b: &str) -> WindowSpec {
    let c = |s: &str| Term::constant(s);
    let z = Term::var("z");
    let constraint = Formula::exists(
        "z",
        Formula::and(vec![
            Formula::Inf(z.clone()),
            Formula::Lt(z, c("c1")),
            Formula::Lt(c("c1"), c("c2")),
            Formula::Eq(c("c2"), c("c1").succ()),
            Formula::Eq(c("c2"), c("c3")),
        ]),
    );
    WindowSpec {
        name: AUTO_WINDOW.into(),
        constants: vec![("c1".into(), a.into()), ("c2".into(), b.into()), ("c3".into(), a.into())],
        constraint,
    }
}

#[cfg(test)]
mod tests;
