use std::collections::BTreeSet;

use crate::caps::Caps;
use crate::logic::{eval_ils, Structure, Term, TermBase};
use crate::model::{port_pre_post, ModelError, PortRule, SystemModel};

use super::{Marking, MarkedPetriNet, NetTransition, PetriError, Place};

/// Port atoms `(port, index)` true in an interpretation.
pub type PortModel = BTreeSet<(String, usize)>;

fn position(t: &Term, env: &Structure) -> Result<usize, PetriError> {
    match &t.base {
        TermBase::Var(v) => {
            let base = *env.vars.get(v).ok_or_else(|| ModelError::Invalid(format!("unbound variable `{v}`")))?;
            Ok((base + t.succs as usize) % env.n)
        }
        _ => Err(ModelError::Invalid(format!("interaction term `{t}` is not a variable")).into()),
    }
}

fn keep_minimal(mut models: Vec<PortModel>) -> Vec<PortModel> {
    models.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    models.dedup();
    let mut kept: Vec<PortModel> = Vec::new();
    for m in models {
        if !kept.iter().any(|k| k.is_subset(&m)) {
            kept.push(m);
        }
    }
    kept.sort();
    kept
}

/// The ⊑-minimal interpretations of the port predicates satisfying the
/// interaction over `[n]`, read off the clauses: each instantiation of a
/// clause has exactly one minimal model.
pub fn minimal_models(model: &SystemModel, n: usize) -> Result<Vec<PortModel>, PetriError> {
    if n == 0 {
        return Err(PetriError::EmptyNet);
    }
    let mut found = Vec::new();
    for clause in model.clauses()? {
        let k = clause.vars.len();
        let total = n.checked_pow(k as u32).ok_or(PetriError::TooManyBits(k))?;
        'assign: for code in 0..total {
            let mut env = Structure::new(n);
            let mut c = code;
            for v in &clause.vars {
                env.vars.insert(v.clone(), c % n);
                c /= n;
            }
            for g in &clause.guards {
                if !eval_ils(g, &env)? {
                    continue 'assign;
                }
            }
            let mut atoms = PortModel::new();
            for a in &clause.ports {
                atoms.insert((a.port.clone(), position(&a.term, &env)?));
            }
            for b in &clause.broadcasts {
                for y in 0..n {
                    let env_y = env.clone().with_var(&b.var, y);
                    if eval_ils(&b.guard, &env_y)? {
                        atoms.insert((b.port.clone(), y));
                    }
                }
            }
            found.push(atoms);
        }
    }
    Ok(keep_minimal(found))
}

/// Same as [`minimal_models`] by evaluating the interaction on every
/// interpretation of the port predicates.
pub fn minimal_models_bruteforce(model: &SystemModel, n: usize) -> Result<Vec<PortModel>, PetriError> {
    if n == 0 {
        return Err(PetriError::EmptyNet);
    }
    let ports: Vec<String> = model.components.iter().flat_map(|c| c.ports.iter().map(|p| p.name.clone())).collect();
    let bits = ports.len() * n;
    if bits > 20 {
        return Err(PetriError::TooManyBits(bits));
    }
    let full = (1u64 << n) - 1;
    let mut found = Vec::new();
    for code in 0..(1u64 << bits) {
        let mut s = Structure::new(n);
        for (k, p) in ports.iter().enumerate() {
            s.preds.insert(p.clone(), (code >> (k * n)) & full);
        }
        if eval_ils(&model.interaction, &s)? {
            let atoms = ports
                .iter()
                .enumerate()
                .flat_map(|(k, p)| (0..n).filter(move |i| code >> (k * n + i) & 1 == 1).map(move |i| (p.clone(), i)))
                .collect();
            found.push(atoms);
        }
    }
    Ok(keep_minimal(found))
}

pub(crate) fn label_of(atoms: &PortModel, slot_name: impl Fn(usize) -> String) -> String {
    atoms.iter().map(|(p, i)| format!("{p}({})", slot_name(*i))).collect::<Vec<_>>().join(" ")
}

/// Pre- and post-places of a set of port atoms; `None` if some port has no
/// transition (such an interaction never fires).
pub(crate) fn edges_of(
    model: &SystemModel,
    net_place: impl Fn(&str, &str, usize) -> usize,
    atoms: &PortModel,
) -> Result<Option<(Vec<usize>, Vec<usize>)>, PetriError> {
    let mut pre = Vec::new();
    let mut post = Vec::new();
    for (port, i) in atoms {
        match port_pre_post(model, port)? {
            PortRule::Rule { component, source, target } => {
                pre.push(net_place(&component, &source, *i));
                post.push(net_place(&component, &target, *i));
            }
            PortRule::NoRule { .. } => return Ok(None),
        }
    }
    pre.sort_unstable();
    pre.dedup();
    post.sort_unstable();
    post.dedup();
    Ok(Some((pre, post)))
}

/// The marked net with `n` instances of every component type: one
/// transition per minimal model of the interaction.
pub fn instantiate_net(model: &SystemModel, n: usize, caps: &Caps) -> Result<MarkedPetriNet, PetriError> {
    if n == 0 {
        return Err(PetriError::EmptyNet);
    }
    if n > caps.net_size {
        return Err(PetriError::NetTooLarge { n, cap: caps.net_size });
    }
    let mut places = Vec::new();
    for c in &model.components {
        for s in &c.states {
            for i in 0..n {
                places.push(Place { ty: c.name.clone(), state: s.clone(), slot: i });
            }
        }
    }
    let initial = Marking::from_places(
        places.len(),
        places.iter().enumerate().filter(|(_, p)| model.component(&p.ty).unwrap().initial == p.state).map(|(i, _)| i),
    );
    let slots: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut net = MarkedPetriNet::new(places, slots, Vec::new(), initial);
    let mut transitions = Vec::new();
    for atoms in minimal_models(model, n)? {
        let lookup = |ty: &str, s: &str, i: usize| net.place_index(ty, s, i).expect("place exists");
        if let Some((pre, post)) = edges_of(model, lookup, &atoms)? {
            transitions.push(NetTransition { pre, post, label: label_of(&atoms, |i| i.to_string()) });
        }
    }
    net.transitions = transitions;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_model;
    use crate::model::tests::PHILOSOPHERS;

    #[test]
    fn philosophers_two() {
        let m = parse_model(PHILOSOPHERS).unwrap();
        let net = instantiate_net(&m, 2, &Caps::default()).unwrap();
        assert_eq!(net.places.len(), 8);
        assert_eq!(net.transitions.len(), 4);
        assert_eq!(minimal_models(&m, 2).unwrap(), minimal_models_bruteforce(&m, 2).unwrap());
    }

    #[test]
    fn philosophers_one_collapses_forks() {
        let m = parse_model(PHILOSOPHERS).unwrap();
        let net = instantiate_net(&m, 1, &Caps::default()).unwrap();
        assert_eq!(net.places.len(), 4);
        assert_eq!(net.transitions.len(), 2);
        let get = net.transitions.iter().find(|t| t.label.starts_with("g(")).unwrap();
        let mut pre: Vec<String> = get.pre.iter().map(|&p| net.place_name(p)).collect();
        pre.sort();
        assert_eq!(pre, vec!["Fork.f@0", "Philosopher.w@0"]);
    }

    #[test]
    fn unsatisfiable_interaction() {
        let m = parse_model("component A { states s init s; port p: s -> s; } interaction exists x. p(x) & false;")
            .unwrap();
        assert!(instantiate_net(&m, 3, &Caps::default()).unwrap().transitions.is_empty());
    }

    #[test]
    fn size_cap() {
        let m = parse_model(PHILOSOPHERS).unwrap();
        assert_eq!(
            instantiate_net(&m, 7, &Caps::default()),
            Err(PetriError::NetTooLarge { n: 7, cap: 6 })
        );
    }

    #[test]
    fn broadcast_models_match_bruteforce() {
        let m = parse_model(
            "component A { states s, u init s; port p: s -> u; port q: u -> s; }
             interaction exists x. p(x) & forall y. y != x -> q(y);",
        )
        .unwrap();
        for n in 1..=3 {
            assert_eq!(minimal_models(&m, n).unwrap(), minimal_models_bruteforce(&m, n).unwrap());
        }
    }
}
