mod common;

use common::*;

#[test]
fn translation_keeps_satisfaction() {
    assert_eq!(lemma_tr(2).unwrap(), CASES);
}

#[test]
fn dual_complement_law() {
    assert_eq!(lemma_dual(3).unwrap(), CASES);
}

#[test]
fn booleanization_agrees() {
    assert_eq!(lemma_bool(4).unwrap(), CASES);
}

#[test]
fn saturation_keeps_minimal_words() {
    assert_eq!(lemma_saturation(5).unwrap(), CASES);
}

#[test]
fn positivation_keeps_minimal_models() {
    let (cases, literal) = lemma_pos_min(6).unwrap();
    assert_eq!(cases, CASES);
    assert!(literal > 0);
}

#[test]
fn booleanization_commutes_with_dual() {
    assert_eq!(bool_dual_commute(7).unwrap(), CASES);
}

#[test]
fn booleanization_commutes_with_positivation() {
    let (cases, literal) = pos_bool_commute(8).unwrap();
    assert_eq!(cases, CASES);
    assert!(literal > 0);
}

#[test]
fn antichain_matches_complement_oracle() {
    assert_eq!(antichain_agrees(9).unwrap(), CASES);
}
