//! Structures as words: position `i` of the word carries, per track, whether
//! the variable sits at `i` or whether `i` belongs to the predicate/set.

use crate::logic::Structure;

use super::{AutomataError, Symbol, TrackKind, TrackRegistry};

pub fn encode_structure(s: &Structure, reg: &TrackRegistry) -> Result<Vec<Symbol>, AutomataError> {
    if s.n == 0 {
        return Err(AutomataError::InvalidWord("empty universe".into()));
    }
    let mut word = vec![0u64; s.n];
    for (j, t) in reg.tracks().iter().enumerate() {
        let missing = || AutomataError::MissingInterpretation(t.name.clone());
        match t.kind {
            TrackKind::FirstOrder => {
                let pos = *s.vars.get(&t.name).or_else(|| s.consts.get(&t.name)).ok_or_else(missing)?;
                if pos >= s.n {
                    return Err(AutomataError::InvalidWord(format!("`{}` = {pos} outside [{}]", t.name, s.n)));
                }
                word[pos] |= 1 << j;
            }
            TrackKind::Predicate | TrackKind::SetVar => {
                let map = if t.kind == TrackKind::Predicate { &s.preds } else { &s.sets };
                let members = *map.get(&t.name).ok_or_else(missing)?;
                for (i, sym) in word.iter_mut().enumerate() {
                    *sym |= (members >> i & 1) << j;
                }
            }
        }
    }
    Ok(word)
}

/// Inverse of [`encode_structure`]; first-order tracks must carry exactly one 1.
pub fn decode_word(word: &[Symbol], reg: &TrackRegistry) -> Result<Structure, AutomataError> {
    if word.is_empty() {
        return Err(AutomataError::InvalidWord("empty word".into()));
    }
    if word.len() > 64 {
        return Err(AutomataError::InvalidWord("word longer than 64".into()));
    }
    let mut s = Structure::new(word.len());
    for (j, t) in reg.tracks().iter().enumerate() {
        let bits: u64 = word.iter().enumerate().fold(0, |m, (i, sym)| m | ((sym >> j & 1) << i));
        match t.kind {
            TrackKind::FirstOrder => {
                if bits.count_ones() != 1 {
                    return Err(AutomataError::InvalidWord(format!(
                        "track `{}` has {} ones",
                        t.name,
                        bits.count_ones()
                    )));
                }
                s.vars.insert(t.name.clone(), bits.trailing_zeros() as usize);
            }
            TrackKind::Predicate => {
                s.preds.insert(t.name.clone(), bits);
            }
            TrackKind::SetVar => {
                s.sets.insert(t.name.clone(), bits);
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Track;

    fn track_string(word: &[Symbol], j: usize) -> String {
        word.iter().map(|s| if s >> j & 1 == 1 { '1' } else { '0' }).collect()
    }

    #[test]
    fn worked_example() {
        let reg = TrackRegistry::new([Track::fo("x1"), Track::pred("pr1"), Track::set("X1")]).unwrap();
        let s = Structure::new(6).with_var("x1", 3).with_pred("pr1", [0, 2, 5]).with_set("X1", [1, 3]);
        let w = encode_structure(&s, &reg).unwrap();
        assert_eq!(track_string(&w, 0), "000100");
        assert_eq!(track_string(&w, 1), "101001");
        assert_eq!(track_string(&w, 2), "010100");
    }

    #[test]
    fn single_position() {
        let reg = TrackRegistry::new([Track::pred("pr")]).unwrap();
        let w = encode_structure(&Structure::new(1).with_pred("pr", []), &reg).unwrap();
        assert_eq!(w, vec![0]);
    }

    #[test]
    fn roundtrip_two_predicates() {
        let reg = TrackRegistry::new([Track::pred("a"), Track::pred("b")]).unwrap();
        for n in 1..=4usize {
            for bits in 0..(1u64 << (2 * n)) {
                let s = Structure::new(n)
                    .with_pred("a", (0..n).filter(|i| (bits >> i) & 1 == 1))
                    .with_pred("b", (0..n).filter(|i| (bits >> (n + i)) & 1 == 1));
                let back = decode_word(&encode_structure(&s, &reg).unwrap(), &reg).unwrap();
                assert_eq!(back, s);
            }
        }
    }

    #[test]
    fn missing_interpretation() {
        let reg = TrackRegistry::new([Track::pred("a")]).unwrap();
        assert_eq!(
            encode_structure(&Structure::new(2), &reg),
            Err(AutomataError::MissingInterpretation("a".into()))
        );
        let reg = TrackRegistry::new([Track::fo("x")]).unwrap();
        assert!(decode_word(&[1, 1], &reg).is_err());
    }
}
