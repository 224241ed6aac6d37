use super::*;
use crate::frontend::parse_model;
use crate::logic::{eval_ils, Structure};
use crate::petri::instantiate_net;
use crate::trapinv::{build_invariant, check_safety, Verdict};

const PHILOSOPHERS: &str = include_str!("../../../../models/philosophers.pbip");
const ALT_PHILOSOPHERS: &str = include_str!("../../../../models/alt_philosophers.pbip");

fn caps() -> Caps {
    Caps::default()
}

fn pairs(d: &[(&str, &str)]) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = d.iter().map(|(p, c)| (p.to_string(), c.to_string())).collect();
    v.sort();
    v
}

#[test]
fn example_window_view() {
    let m = parse_model(ALT_PHILOSOPHERS).unwrap();
    let w = m.window("w1").unwrap();
    let check = check_window(&m, w, &caps()).unwrap();
    assert!(check.is_valid());
    // the get-right instance lies inside the window
    let get_right = check.instances.iter().find(|i| i.inside() == pairs(&[("gr", "c1"), ("g", "c2")])).unwrap();
    assert_eq!(get_right.entailment, Entailment::Holds);

    let view = build_view(w, &check).unwrap();
    let mut want = vec![
        pairs(&[("gr", "c1"), ("g", "c2")]),
        pairs(&[("p", "c1"), ("l", "c2")]),
        pairs(&[("gl", "c3"), ("g", "c2")]),
        pairs(&[("gl", "c1")]),
        pairs(&[("gr", "c3")]),
        pairs(&[("p", "c3"), ("l", "c2")]),
    ];
    want.sort();
    assert_eq!(view.disjuncts, want);
}

#[test]
fn example_window_reach() {
    let m = parse_model(ALT_PHILOSOPHERS).unwrap();
    let o = analyze_window(&m, m.window("w1").unwrap(), &caps()).unwrap();
    assert_eq!(o.reach.net.places.len(), 8);
    assert_eq!(o.reach.net.transitions.len(), 6);
    let got: BTreeSet<Vec<String>> = o.reach.disjuncts().into_iter().collect();
    let want: BTreeSet<Vec<String>> = [
        ["w", "f", "w"],
        ["h", "f", "w"],
        ["w", "b", "h"],
        ["e", "b", "w"],
        ["h", "b", "h"],
        ["w", "b", "e"],
        ["h", "b", "e"],
    ]
    .iter()
    .map(|[a, b, c]| {
        let mut v = vec![format!("Lr.{a}(c1)"), format!("Fork.{b}(c2)"), format!("Lr.{c}(c3)")];
        v.sort();
        v
    })
    .collect();
    assert_eq!(got, want);
}

#[test]
fn false_window_is_vacuous() {
    let m = parse_model(ALT_PHILOSOPHERS).unwrap();
    let w = WindowSpec { name: "none".into(), constants: vec![("c1".into(), "Lr".into())], constraint: Formula::False };
    let check = check_window(&m, &w, &caps()).unwrap();
    assert!(check.is_valid());
    let view = build_view(&w, &check).unwrap();
    assert!(view.disjuncts.iter().all(|d| !d.is_empty()));
    let empty = View { window: "none".into(), constants: w.constants.clone(), disjuncts: vec![] };
    let reach = view_reach_formula(&m, &empty, &caps()).unwrap();
    assert_eq!(reach.disjuncts(), vec![vec!["Lr.w(c1)".to_string()]]);
}

#[test]
fn overlapping_window() {
    let m = parse_model(
        "component A { states s init s; port p: s -> s; }
         component B { states s init s; port q: s -> s; }
         interaction exists x. exists y. x = succ(y) & p(x) & q(y);
         window \"w\" (c1: A, c2: B) where c1 <= c2;",
    )
    .unwrap();
    let w = m.window("w").unwrap();
    let check = check_window(&m, w, &caps()).unwrap();
    assert!(!check.is_valid());
    assert!(matches!(build_view(w, &check), Err(AshcroftError::Overlapping { .. })));
}

#[test]
fn single_philosopher_window() {
    let m = parse_model(PHILOSOPHERS).unwrap();
    let w = WindowSpec { name: "one".into(), constants: vec![("c1".into(), "Philosopher".into())], constraint: Formula::True };
    let view = build_view(&w, &check_window(&m, &w, &caps()).unwrap()).unwrap();
    assert_eq!(view.disjuncts, vec![pairs(&[("g", "c1")]), pairs(&[("p", "c1")])]);
}

fn structure_of(net: &MarkedPetriNet, m: &Marking) -> Structure {
    let mut s = Structure::new(net.slots.len());
    for (i, pl) in net.places.iter().enumerate() {
        let name = format!("{}.{}", pl.ty, pl.state);
        let bits = s.preds.entry(name).or_insert(0);
        if m.get(i) {
            *bits |= 1 << pl.slot;
        }
    }
    s
}

#[test]
fn ashcroft_invariant_holds_on_reachable_markings() {
    let m = parse_model(ALT_PHILOSOPHERS).unwrap();
    for w in &m.windows {
        let o = analyze_window(&m, w, &caps()).unwrap();
        for n in 1..=5 {
            let net = instantiate_net(&m, n, &caps()).unwrap();
            for r in reachable_markings(&net, 1_000_000, true).unwrap() {
                assert!(eval_ils(&o.invariant, &structure_of(&net, &r)).unwrap(), "{} n={n}", w.name);
            }
        }
    }
}

#[test]
fn alternating_needs_the_wraparound_window() {
    let m = parse_model(ALT_PHILOSOPHERS).unwrap();
    let b = build_invariant(&m, &caps()).unwrap();
    let w1 = m.window("w1").unwrap().clone();
    let w2 = m.window("w2").unwrap().clone();

    // w1 never covers fork 0, so Lr(n-1) eating next to a free fork 0 survives
    let (r, _) = strengthen_and_check(&m, &b, &PropertySpec::deadlock(), &[w1.clone()], 2, &caps()).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    let n = r.witness_size().unwrap();
    let wit = r.witness.as_ref().unwrap();
    let has = |i: usize, ty: &str, st: &str| wit.iter().any(|e| e.index == i && e.ty == ty && e.state == st);
    assert!(has(0, "Fork", "f") && has(n - 1, "Lr", "e"));

    let (r, _) = strengthen_and_check(&m, &b, &PropertySpec::deadlock(), &[w1, w2], 2, &caps()).unwrap();
    assert_eq!(r.verdict, Verdict::Safe);
    assert_eq!(r.windows, vec!["w1", "w2"]);
}

#[test]
fn auto_window_is_the_adjacent_triple() {
    let m = parse_model(ALT_PHILOSOPHERS).unwrap();
    let w = auto_window(&m, &caps()).unwrap().unwrap();
    let tys: Vec<&str> = w.constants.iter().map(|(_, t)| t.as_str()).collect();
    assert_eq!(tys, ["Lr", "Fork", "Lr"]);
    let b = build_invariant(&m, &caps()).unwrap();
    let (r, _) = strengthen_and_check(&m, &b, &PropertySpec::deadlock(), &[w], 2, &caps()).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.assumptions.iter().any(|a| a.contains("heuristic")));
}

#[test]
fn strengthening_keeps_safe() {
    let m = parse_model(PHILOSOPHERS).unwrap();
    let b = build_invariant(&m, &caps()).unwrap();
    assert_eq!(check_safety(&m, &b, &PropertySpec::deadlock(), 2, &caps()).unwrap().verdict, Verdict::Safe);
    let w = auto_window(&m, &caps()).unwrap().unwrap();
    let (r, _) = strengthen_and_check(&m, &b, &PropertySpec::deadlock(), &[w], 2, &caps()).unwrap();
    assert_eq!(r.verdict, Verdict::Safe);
}
