use trapmark_core::caps::Caps;
use trapmark_core::frontend::parse_model;
use trapmark_core::logic::{eval_ils, Structure};
use trapmark_core::model::{PropertyKind, SystemModel};
use trapmark_core::petri::{instantiate_net, reachable_markings, Marking, MarkedPetriNet};
use trapmark_core::trapinv::{build_invariant, check_safety, Verdict};

fn load(name: &str) -> SystemModel {
    let path = format!("{}/../../models/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_model(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn structure_of(net: &MarkedPetriNet, m: &Marking) -> Structure {
    let mut s = Structure::new(net.slots.len());
    for (i, pl) in net.places.iter().enumerate() {
        let bits = s.preds.entry(format!("{}.{}", pl.ty, pl.state)).or_insert(0);
        if m.get(i) {
            *bits |= 1 << pl.slot;
        }
    }
    s
}

fn verdicts(name: &str) -> Vec<(String, Verdict)> {
    let m = load(name);
    let caps = Caps::default();
    let b = build_invariant(&m, &caps).unwrap();
    m.properties.iter().map(|p| (p.name.clone(), check_safety(&m, &b, p, 2, &caps).unwrap().verdict)).collect()
}

/// Explicit-state ground truth: no reachable marking of size 2..=max is bad.
fn holds_up_to(name: &str, max: usize) {
    let m = load(name);
    let caps = Caps::default();
    for n in 2..=max {
        let net = instantiate_net(&m, n, &caps).unwrap();
        for r in reachable_markings(&net, caps.markings, true).unwrap() {
            for p in &m.properties {
                let bad = match &p.kind {
                    PropertyKind::Deadlock => net.is_deadlock(&r),
                    PropertyKind::BadStates(f) => eval_ils(f, &structure_of(&net, &r)).unwrap(),
                };
                assert!(!bad, "{name}: {} violated at n={n}: {:?}", p.name, net.marking_names(&r));
            }
        }
    }
}

#[test]
fn exclusive_tasks() {
    let v = verdicts("exclusive_tasks.pbip");
    assert_eq!(v, [("deadlock".to_string(), Verdict::Safe), ("mutex".to_string(), Verdict::Safe)]);
    holds_up_to("exclusive_tasks.pbip", 5);
}

#[test]
fn philosophers_with_global_forks() {
    assert_eq!(verdicts("philosophers3.pbip"), [("deadlock".to_string(), Verdict::Safe)]);
    holds_up_to("philosophers3.pbip", 5);
}

#[test]
fn szymanski_needs_more_than_traps() {
    assert_eq!(verdicts("szymanski.pbip"), [("mutex".to_string(), Verdict::Inconclusive)]);
    // the protocol itself is mutually exclusive on small instances
    holds_up_to("szymanski.pbip", 4);
    let m = load("szymanski.pbip");
    let net = instantiate_net(&m, 3, &Caps::default()).unwrap();
    let reach = reachable_markings(&net, 1_000_000, true).unwrap();
    for i in 0..3 {
        let c = net.place_index("Proc", "c", i).unwrap();
        assert!(reach.iter().any(|r| r.get(c)), "Proc {i} never enters");
    }
}
