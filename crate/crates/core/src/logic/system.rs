//! Formulas derived from a system model: trap constraint, deadlock states,
//! initial states, decomposability and size bounds.

use crate::model::{port_pre_post, ModelError, PortRule, SystemModel};

use super::{Formula, Term};

fn pre_atom(model: &SystemModel, port: &str, t: &Term) -> Result<Formula, ModelError> {
    let rule = port_pre_post(model, port)?;
    Ok(rule.pre_pred().map_or(Formula::False, |p| Formula::Pred(p, t.clone())))
}

fn post_atom(model: &SystemModel, port: &str, t: &Term) -> Result<Formula, ModelError> {
    let rule = port_pre_post(model, port)?;
    Ok(rule.post_pred().map_or(Formula::False, |p| Formula::Pred(p, t.clone())))
}

fn forall_all(vars: &[String], body: Formula) -> Formula {
    vars.iter().rev().fold(body, |acc, v| Formula::forall(v.clone(), acc))
}

/// The parametric trap constraint: one conjunct per interaction clause,
/// `forall x. guard & (pre-side) -> (post-side)`.
pub fn build_trap_constraint(model: &SystemModel) -> Result<Formula, ModelError> {
    let mut conjuncts = Vec::new();
    for c in model.clauses()? {
        // a rendez-vous with a port that has no transition never fires
        if c.ports.iter().any(|a| matches!(port_pre_post(model, &a.port), Ok(PortRule::NoRule { .. }))) {
            continue;
        }
        let mut pre = Vec::new();
        let mut post = Vec::new();
        for a in &c.ports {
            pre.push(pre_atom(model, &a.port, &a.term)?);
            post.push(post_atom(model, &a.port, &a.term)?);
        }
        for b in &c.broadcasts {
            let y = Term::var(b.var.clone());
            pre.push(Formula::exists(b.var.clone(), Formula::and(vec![b.guard.clone(), pre_atom(model, &b.port, &y)?])));
            post.push(Formula::exists(b.var.clone(), Formula::and(vec![b.guard.clone(), post_atom(model, &b.port, &y)?])));
        }
        let mut lhs = c.guards.clone();
        lhs.push(Formula::or(pre));
        conjuncts.push(forall_all(&c.vars, Formula::implies(Formula::and(lhs), Formula::or(post))));
    }
    Ok(Formula::and(conjuncts))
}

/// States in which no interaction is enabled. A clause is enabled when its
/// guard holds, every rendez-vous port is enabled, and every instance selected
/// by a broadcast is enabled too (the fixed-n nets only fire a broadcast
/// with all its receivers, so receivers block).
pub fn build_deadlock_formula(model: &SystemModel) -> Result<Formula, ModelError> {
    let mut conjuncts = Vec::new();
    for c in model.clauses()? {
        let mut disabled: Vec<Formula> = c.guards.iter().map(|g| Formula::not(g.clone())).collect();
        for a in &c.ports {
            disabled.push(Formula::not(pre_atom(model, &a.port, &a.term)?));
        }
        for b in &c.broadcasts {
            let y = Term::var(b.var.clone());
            disabled.push(Formula::exists(
                b.var.clone(),
                Formula::and(vec![b.guard.clone(), Formula::not(pre_atom(model, &b.port, &y)?)]),
            ));
        }
        conjuncts.push(forall_all(&c.vars, Formula::or(disabled)));
    }
    Ok(Formula::and(conjuncts))
}

/// `exists x. s0(x) | ...` over the initial states of all component types.
pub fn build_init_formula(model: &SystemModel) -> Formula {
    let x = Term::var("x");
    Formula::exists(
        "x",
        Formula::or(model.components.iter().map(|c| Formula::Pred(c.state_pred(&c.initial), x.clone())).collect()),
    )
}

/// Every index holds exactly one state of every component type.
pub fn build_decomposability_formula(model: &SystemModel) -> Formula {
    let x = Term::var("x");
    let mut parts = Vec::new();
    for c in &model.components {
        let atoms: Vec<Formula> = c.states.iter().map(|s| Formula::Pred(c.state_pred(s), x.clone())).collect();
        let mut exactly_one = vec![Formula::or(atoms.clone())];
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                exactly_one.push(Formula::Or(vec![Formula::not(atoms[i].clone()), Formula::not(atoms[j].clone())]));
            }
        }
        parts.push(Formula::and(exactly_one));
    }
    Formula::forall("x", Formula::and(parts))
}

/// `exists x1 < x2 < ... < xk. true`: the universe has at least `k` elements.
pub fn build_size_formula(k: usize) -> Formula {
    if k <= 1 {
        return Formula::True;
    }
    let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let body = Formula::and(
        names.windows(2).map(|w| Formula::Lt(Term::var(w[0].clone()), Term::var(w[1].clone()))).collect(),
    );
    names.iter().rev().fold(body, |acc, v| Formula::exists(v.clone(), acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_formula, parse_model};
    use crate::logic::{eval_ils, Structure};
    use crate::model::tests::PHILOSOPHERS;

    fn all_structures<'a>(n: usize, preds: &'a [&'a str]) -> impl Iterator<Item = Structure> + 'a {
        let m = (1u64 << n) - 1;
        (0..(1u64 << (n * preds.len()))).map(move |bits| {
            let mut s = Structure::new(n);
            for (k, p) in preds.iter().enumerate() {
                s.preds.insert(p.to_string(), (bits >> (k * n)) & m);
            }
            s
        })
    }

    const PREDS: [&str; 4] = ["Fork.f", "Fork.b", "Philosopher.w", "Philosopher.e"];

    #[test]
    fn philosophers_trap_constraint_is_the_biconditional() {
        let m = parse_model(PHILOSOPHERS).unwrap();
        let theta = build_trap_constraint(&m).unwrap();
        let want = parse_formula(
            "forall i. Philosopher.w(i) | Fork.f(i) | Fork.f(succ(i)) <-> Philosopher.e(i) | Fork.b(i) | Fork.b(succ(i))",
        )
        .unwrap();
        for n in 1..=3 {
            for s in all_structures(n, &PREDS) {
                assert_eq!(eval_ils(&theta, &s), eval_ils(&want, &s));
            }
        }
        assert!(theta.free_symbols().preds.iter().all(|p| m.is_state_pred(p)));
    }

    #[test]
    fn philosophers_deadlock_formula() {
        let m = parse_model(PHILOSOPHERS).unwrap();
        let delta = build_deadlock_formula(&m).unwrap();
        let want = parse_formula(
            "forall i. (!Philosopher.w(i) | !Fork.f(i) | !Fork.f(succ(i))) & (!Philosopher.e(i) | !Fork.b(i) | !Fork.b(succ(i)))",
        )
        .unwrap();
        for n in 1..=3 {
            for s in all_structures(n, &PREDS) {
                assert_eq!(eval_ils(&delta, &s), eval_ils(&want, &s));
            }
        }
    }

    #[test]
    fn single_port_clause() {
        let m = parse_model("component A { states s, u init s; port p: s -> u; } interaction exists x. p(x);").unwrap();
        assert_eq!(
            build_trap_constraint(&m).unwrap(),
            parse_formula("forall x. A.s(x) -> A.u(x)").unwrap()
        );
        assert_eq!(build_deadlock_formula(&m).unwrap(), parse_formula("forall x. !A.s(x)").unwrap());
        assert_eq!(build_init_formula(&m), parse_formula("exists x. A.s(x)").unwrap());
    }

    #[test]
    fn init_and_decomposability() {
        let m = parse_model(PHILOSOPHERS).unwrap();
        assert_eq!(build_init_formula(&m), parse_formula("exists x. Fork.f(x) | Philosopher.w(x)").unwrap());
        let d = build_decomposability_formula(&m);
        assert_eq!(
            d,
            parse_formula(
                "forall x. ((Fork.f(x) | Fork.b(x)) & (!Fork.f(x) | !Fork.b(x))) & ((Philosopher.w(x) | Philosopher.e(x)) & (!Philosopher.w(x) | !Philosopher.e(x)))"
            )
            .unwrap()
        );
    }

    #[test]
    fn size_formula_counts() {
        let f = build_size_formula(3);
        for n in 1..6 {
            assert_eq!(eval_ils(&f, &Structure::new(n)).unwrap(), n >= 3);
        }
    }
}
