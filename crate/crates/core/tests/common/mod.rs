//! Randomized law suites shared by the `lemmas` tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trapmark_core::automata::{
    antichain_included, complement, encode_structure, is_empty, product, saturate, Cube, StateId, Symbol, Track,
    TrackKind, TrackNfa, TrackRegistry,
};
use trapmark_core::logic::{dualize, eval_ils, eval_wss, flatten, nnf, translate_tr, Formula, Structure, Term};
use trapmark_core::petri::{booleanize, pos, PropVar};
use trapmark_core::wss_compile::{compile, positive_formula_of};

pub const CASES: usize = 200;
pub const PREDS: [&str; 2] = ["p", "q"];

/// Random sentences over `p` and `q`.
pub struct FormulaGen {
    rng: ChaCha8Rng,
    sets: bool,
    /// No `0` constant, which IL1S lacks.
    il1s: bool,
    fresh: usize,
}

impl FormulaGen {
    pub fn new(seed: u64, sets: bool) -> FormulaGen {
        FormulaGen { rng: ChaCha8Rng::seed_from_u64(seed), sets, il1s: false, fresh: 0 }
    }

    pub fn il1s(seed: u64) -> FormulaGen {
        FormulaGen { il1s: true, ..FormulaGen::new(seed, false) }
    }

    pub fn sentence(&mut self, depth: usize) -> Formula {
        let mut fo = Vec::new();
        let mut so = Vec::new();
        self.quantified(depth, &mut fo, &mut so)
    }

    fn term(&mut self, fo: &[String]) -> Term {
        let base = if fo.is_empty() || (!self.il1s && self.rng.gen_bool(0.1)) {
            Term::zero()
        } else {
            Term::var(fo[self.rng.gen_range(0..fo.len())].clone())
        };
        if self.rng.gen_bool(0.3) {
            base.succ()
        } else {
            base
        }
    }

    fn atom(&mut self, fo: &[String], so: &[String]) -> Formula {
        let t = self.term(fo);
        match self.rng.gen_range(0..9) {
            0..=3 => Formula::pred(PREDS[self.rng.gen_range(0..PREDS.len())], t),
            4 => Formula::Eq(t, self.term(fo)),
            5 => Formula::Lt(t, self.term(fo)),
            6 => Formula::Le(t, self.term(fo)),
            7 if !so.is_empty() => Formula::SetMem(so[self.rng.gen_range(0..so.len())].clone(), t),
            7 => Formula::Inf(t),
            _ => Formula::Sup(t),
        }
    }

    fn quantified(&mut self, depth: usize, fo: &mut Vec<String>, so: &mut Vec<String>) -> Formula {
        self.fresh += 1;
        if self.sets && self.rng.gen_bool(0.2) {
            let v = format!("X{}", self.fresh);
            so.push(v.clone());
            let body = self.formula(depth.saturating_sub(1), fo, so);
            so.pop();
            if self.rng.gen_bool(0.5) {
                Formula::exists_set(v, body)
            } else {
                Formula::forall_set(v, body)
            }
        } else {
            let v = format!("x{}", self.fresh);
            fo.push(v.clone());
            let body = self.formula(depth.saturating_sub(1), fo, so);
            fo.pop();
            if self.rng.gen_bool(0.5) {
                Formula::exists(v, body)
            } else {
                Formula::forall(v, body)
            }
        }
    }

    fn formula(&mut self, depth: usize, fo: &mut Vec<String>, so: &mut Vec<String>) -> Formula {
        if depth == 0 {
            return self.atom(fo, so);
        }
        match self.rng.gen_range(0..10) {
            0 | 1 => self.atom(fo, so),
            2 => Formula::not(self.formula(depth - 1, fo, so)),
            3 | 4 => Formula::and(vec![self.formula(depth - 1, fo, so), self.formula(depth - 1, fo, so)]),
            5 | 6 => Formula::or(vec![self.formula(depth - 1, fo, so), self.formula(depth - 1, fo, so)]),
            7 => Formula::implies(self.formula(depth - 1, fo, so), self.formula(depth - 1, fo, so)),
            _ => self.quantified(depth, fo, so),
        }
    }
}

/// Structure over `p` and `q` whose predicate bits are `bits`, `n` per predicate.
pub fn structure(n: usize, bits: u64) -> Structure {
    let mask = (1u64 << n) - 1;
    let mut s = Structure::new(n);
    for (k, p) in PREDS.iter().enumerate() {
        s.preds.insert(p.to_string(), bits >> (k * n) & mask);
    }
    s
}

pub fn valuation(n: usize, bits: u64) -> impl Fn(&PropVar) -> bool {
    move |v: &PropVar| {
        let k = PREDS.iter().position(|p| *p == v.pred).expect("known predicate");
        bits >> (k * n + v.index) & 1 == 1
    }
}

/// ⊆-minimal elements of a set of bitmasks.
pub fn minimal(models: &BTreeSet<u64>) -> BTreeSet<u64> {
    models.iter().copied().filter(|&m| !models.iter().any(|&o| o != m && o & m == o)).collect()
}

fn fail(law: &str, phi: &Formula, detail: String) -> String {
    format!("{law}: {phi}: {detail}")
}

/// Translation into WS1S keeps satisfaction, `n <= 4`.
pub fn lemma_tr(seed: u64) -> Result<usize, String> {
    let mut g = FormulaGen::il1s(seed);
    for _ in 0..CASES {
        let phi = g.sentence(3);
        let tr = translate_tr(&flatten(&phi)).map_err(|e| fail("tr", &phi, e.to_string()))?;
        for n in 1..=4 {
            for bits in 0..1u64 << (2 * n) {
                let s = structure(n, bits);
                let want = eval_ils(&phi, &s).map_err(|e| e.to_string())?;
                let got = eval_wss(&tr, &s).map_err(|e| e.to_string())?;
                if want != got {
                    return Err(fail("tr", &phi, format!("n={n} bits={bits:b}: IL1S {want}, WS1S {got}")));
                }
            }
        }
    }
    Ok(CASES)
}

/// `S |= phi` iff the complemented structure refutes the dual, `n <= 4`.
pub fn lemma_dual(seed: u64) -> Result<usize, String> {
    let mut g = FormulaGen::new(seed, true);
    for _ in 0..CASES {
        let phi = nnf(&g.sentence(3));
        let dual = dualize(&phi);
        for n in 1..=4 {
            for bits in 0..1u64 << (2 * n) {
                let s = structure(n, bits);
                let want = eval_wss(&phi, &s).map_err(|e| e.to_string())?;
                let got = !eval_wss(&dual, &s.complement_preds()).map_err(|e| e.to_string())?;
                if want != got {
                    return Err(fail("dual", &phi, format!("n={n} bits={bits:b}")));
                }
            }
        }
    }
    Ok(CASES)
}

/// Booleanization agrees with structure satisfaction, `n <= 3`.
pub fn lemma_bool(seed: u64) -> Result<usize, String> {
    let mut g = FormulaGen::new(seed, true);
    for _ in 0..CASES {
        let phi = g.sentence(3);
        for n in 1..=3 {
            let b = booleanize(&phi, n).map_err(|e| fail("bool", &phi, e.to_string()))?;
            for bits in 0..1u64 << (2 * n) {
                let want = eval_wss(&phi, &structure(n, bits)).map_err(|e| e.to_string())?;
                if b.eval(&valuation(n, bits)) != want {
                    return Err(fail("bool", &phi, format!("n={n} bits={bits:b}")));
                }
            }
        }
    }
    Ok(CASES)
}

/// `bool_n(dual(phi))` and `dual(bool_n(phi))` are equivalent, `n <= 3`.
pub fn bool_dual_commute(seed: u64) -> Result<usize, String> {
    let mut g = FormulaGen::new(seed, true);
    for _ in 0..CASES {
        let phi = g.sentence(3);
        for n in 1..=3 {
            let left = booleanize(&dualize(&phi), n).map_err(|e| e.to_string())?;
            let right = booleanize(&phi, n).map_err(|e| e.to_string())?.dual();
            for bits in 0..1u64 << (2 * n) {
                if left.eval(&valuation(n, bits)) != right.eval(&valuation(n, bits)) {
                    return Err(fail("bool/dual", &phi, format!("n={n} bits={bits:b}")));
                }
            }
        }
    }
    Ok(CASES)
}

/// Positive formula of the saturated automaton of `phi`, with the automaton.
fn positivation(phi: &Formula) -> Result<(TrackNfa, Formula), String> {
    let a = compile(phi).map_err(|e| e.to_string())?;
    // sentences that mention only one predicate still get both tracks
    let reg = TrackRegistry::new(PREDS.iter().map(|p| Track::pred(*p))).map_err(|e| e.to_string())?;
    let a = trapmark_core::automata::extend(&a, &reg).map_err(|e| e.to_string())?;
    let sat = saturate(&a, reg.kind_mask(TrackKind::Predicate)).map_err(|e| e.to_string())?;
    let pos = positive_formula_of(&sat).map_err(|e| e.to_string())?;
    Ok((sat, pos))
}

/// Models of the positive formula at size `n`, as predicate bitmasks.
/// The formula has one set quantifier per automaton state, so direct
/// evaluation is used only while `2^(n * states)` stays small.
fn pos_models(sat: &TrackNfa, pos: &Formula, n: usize, literal: &mut bool) -> Result<BTreeSet<u64>, String> {
    *literal = n * sat.num_states() <= 12;
    let mut out = BTreeSet::new();
    for bits in 0..1u64 << (2 * n) {
        let s = structure(n, bits);
        let holds = if *literal {
            eval_wss(pos, &s).map_err(|e| e.to_string())?
        } else {
            sat.accepts(&encode_structure(&s, sat.registry()).map_err(|e| e.to_string())?)
        };
        if holds {
            out.insert(bits);
        }
    }
    Ok(out)
}

/// `phi` and its positive formula have the same minimal models, `n <= 3`.
/// Returns the number of cases and how many were decided by evaluating the
/// positive formula itself.
pub fn lemma_pos_min(seed: u64) -> Result<(usize, usize), String> {
    let mut g = FormulaGen::new(seed, false);
    let mut literal_cases = 0;
    for _ in 0..CASES {
        let phi = g.sentence(2);
        let (sat, pos) = positivation(&phi)?;
        let mut all_literal = true;
        for n in 1..=3 {
            let mut models = BTreeSet::new();
            for bits in 0..1u64 << (2 * n) {
                if eval_wss(&phi, &structure(n, bits)).map_err(|e| e.to_string())? {
                    models.insert(bits);
                }
            }
            let mut literal = false;
            let pm = pos_models(&sat, &pos, n, &mut literal)?;
            all_literal &= literal;
            if minimal(&models) != minimal(&pm) {
                return Err(fail("pos", &phi, format!("n={n}: minimal models differ")));
            }
        }
        literal_cases += all_literal as usize;
    }
    Ok((CASES, literal_cases))
}

/// `pos(bool_n(phi))` and `bool_n(pos(phi))` are equivalent, `n <= 3`.
/// The right side is booleanized literally when small enough and otherwise
/// evaluated through the saturated automaton.
pub fn pos_bool_commute(seed: u64) -> Result<(usize, usize), String> {
    let mut g = FormulaGen::new(seed, false);
    let mut literal_cases = 0;
    for _ in 0..CASES {
        let phi = g.sentence(2);
        let (sat, positive) = positivation(&phi)?;
        let mut all_literal = true;
        for n in 1..=3 {
            let left = pos(&booleanize(&phi, n).map_err(|e| e.to_string())?, 100_000).map_err(|e| e.to_string())?;
            let right: Box<dyn Fn(u64) -> Result<bool, String>> = if n * sat.num_states() <= 9 {
                let b = booleanize(&positive, n).map_err(|e| e.to_string())?;
                Box::new(move |bits| Ok(b.eval(&valuation(n, bits))))
            } else {
                all_literal = false;
                let sat = sat.clone();
                Box::new(move |bits| {
                    let w = encode_structure(&structure(n, bits), sat.registry()).map_err(|e| e.to_string())?;
                    Ok(sat.accepts(&w))
                })
            };
            for bits in 0..1u64 << (2 * n) {
                if left.eval(&valuation(n, bits)) != right(bits)? {
                    return Err(fail("pos/bool", &phi, format!("n={n} bits={bits:b}")));
                }
            }
        }
        literal_cases += all_literal as usize;
    }
    Ok((CASES, literal_cases))
}

pub fn pred_registry(width: usize) -> TrackRegistry {
    TrackRegistry::new((0..width).map(|i| Track::pred(format!("p{i}")))).unwrap()
}

pub fn random_nfa(rng: &mut impl Rng, width: usize, max_states: usize) -> TrackNfa {
    let mut a = TrackNfa::new(pred_registry(width));
    let n = rng.gen_range(1..=max_states);
    for _ in 0..n {
        let f = rng.gen_bool(0.3);
        a.add_state(f);
    }
    a.add_initial(0);
    let all = (1u64 << width) - 1;
    for _ in 0..rng.gen_range(n..=3 * n) {
        let s = rng.gen_range(0..n) as StateId;
        let t = rng.gen_range(0..n) as StateId;
        let mask = rng.gen::<u64>() & all;
        a.add_edge(s, Cube::new(rng.gen::<u64>() & mask, mask), t);
    }
    a
}

/// Words of length `len` over `width` tracks, packed `len * width` bits.
fn unpack(code: u64, width: usize, len: usize) -> Vec<Symbol> {
    (0..len).map(|i| code >> (i * width) & ((1 << width) - 1)).collect()
}

/// Minimal words of each length up to `max_len`, by brute force.
fn min_language(a: &TrackNfa, width: usize, max_len: usize) -> BTreeSet<(usize, u64)> {
    let mut out = BTreeSet::new();
    for len in 0..=max_len {
        let bits = len * width;
        let size = 1usize << bits;
        let accepted: Vec<bool> = (0..size as u64).map(|c| a.accepts(&unpack(c, width, len))).collect();
        // below[c]: some accepted word lies strictly under c
        let mut order: Vec<u64> = (0..size as u64).collect();
        order.sort_by_key(|c| c.count_ones());
        let mut below = vec![false; size];
        for &c in &order {
            below[c as usize] = (0..bits).filter(|b| c >> b & 1 == 1).any(|b| {
                let d = (c & !(1 << b)) as usize;
                accepted[d] || below[d]
            });
            if accepted[c as usize] && !below[c as usize] {
                out.insert((len, c));
            }
        }
    }
    out
}

/// Saturation keeps the minimal language: width <= 3, words up to length 5.
pub fn lemma_saturation(seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..CASES {
        let width = rng.gen_range(1..=3);
        let a = random_nfa(&mut rng, width, 5);
        let sat = saturate(&a, (1 << width) - 1).map_err(|e| e.to_string())?;
        if min_language(&a, width, 5) != min_language(&sat, width, 5) {
            return Err(format!("saturation: case {case} (width {width}) changes the minimal language"));
        }
    }
    Ok(CASES)
}

/// Antichain inclusion against emptiness of `A x complement(B)`.
pub fn antichain_agrees(seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..CASES {
        let width = rng.gen_range(1..=3);
        let a = random_nfa(&mut rng, width, 12);
        let b = random_nfa(&mut rng, width, 12);
        let r = antichain_included(&a, &b).map_err(|e| e.to_string())?;
        let oracle = is_empty(&product(&a, &complement(&b)).map_err(|e| e.to_string())?);
        if r.included != oracle {
            return Err(format!("antichain: case {case}: {} vs oracle {oracle}", r.included));
        }
        if let Some(w) = &r.witness {
            if !a.accepts(w) || b.accepts(w) {
                return Err(format!("antichain: case {case}: bad witness {w:?}"));
            }
        }
    }
    Ok(CASES)
}
