use super::*;
use crate::automata::words_up_to;
use crate::machines::{classify, Classification, Family};
use num_bigint::BigUint;
use proptest::prelude::*;

#[test]
fn figure_dfa_examples() {
    assert_eq!(build_figure_dfa(1).unwrap().state_count(), 4);
    let d = build_figure_dfa(3).unwrap();
    assert!(d.run("aaabbb").unwrap());
    assert!(!d.run("aaabbbbb").unwrap());
}

#[test]
fn figure_dfa_solves_the_promise() {
    for m in 1..=4 {
        let d = build_figure_dfa(m).unwrap();
        for w in words_up_to(&['a', 'b'], 2 * m as usize + 3) {
            match classify(Family::Aeq(m), &w).unwrap() {
                Classification::Yes => assert!(d.run(&w).unwrap()),
                Classification::No => assert!(!d.run(&w).unwrap(), "{w}"),
                Classification::OutsidePromise => {}
            }
        }
    }
}

#[test]
fn twin_dfa_examples() {
    let d = build_twin_dfa(3).unwrap();
    assert!(d.run("abacaba").unwrap());
    assert!(!d.run("abacabb").unwrap());
    assert!(build_twin_dfa(1).unwrap().minimize().state_count() >= 2);
    assert!(build_twin_dfa(3).unwrap().minimize().state_count() >= 8);
    assert!(build_twin_dfa(6).is_err());
}

#[test]
fn minimisation_preserves_the_language() {
    let d = build_twin_dfa(2).unwrap();
    let min = d.minimize();
    for w in words_up_to(&['a', 'b', 'c'], 7) {
        assert_eq!(d.run(&w).unwrap(), min.run(&w).unwrap());
        assert_eq!(d.run(&w).unwrap(), classify(Family::TwinM(2), &w).unwrap() == Classification::Yes);
    }
}

#[test]
fn certificates() {
    let c = nerode_distinguishability(Family::Aeq(2), 2).unwrap();
    assert_eq!(c.bound, 6);
    let w = c.witnesses.iter().find(|w| (w.yes.as_str(), w.no.as_str()) == ("a", "aa")).unwrap();
    assert_eq!(w.extension, "abb");
    assert_eq!(nerode_distinguishability(Family::Aeq(5), 5).unwrap().prefixes.len(), 12);
    let t = nerode_distinguishability(Family::TwinM(2), 2).unwrap();
    assert_eq!(t.bound, 4);
    assert!(t.witnesses.iter().any(|w| w.yes == "ab" && w.no == "ba" && w.extension == "cab"));
    assert!(nerode_distinguishability(Family::Leq, 2).is_err());
}

#[test]
fn protocol_audit() {
    let a = eq_protocol_audit(&build_twin_dfa(2).unwrap(), 2).unwrap();
    assert_eq!(a.pairs, 16);
    let a = eq_protocol_audit(&build_twin_dfa(3).unwrap().minimize(), 3).unwrap();
    assert_eq!(a.implied_bound, 8);
    assert!(a.satisfied);
    let wrong = build_twin_dfa(2).unwrap();
    assert!(matches!(eq_protocol_audit(&wrong, 3), Err(BaselineError::Protocol { .. })));
}

#[test]
fn walk_absorption_small_cases() {
    assert_eq!(random_walk_absorption(1).unwrap(), rat(1, 2));
    assert_eq!(random_walk_absorption(3).unwrap(), rat(1, 4));
    assert_eq!(random_walk_absorption(50).unwrap(), rat(1, 51));
}

#[test]
fn calculator_examples() {
    let n = |b: u64, model| min_states(&BigUint::from(b), model).unwrap();
    assert_eq!(n(4, Model::TwoDfa), 1);
    assert_eq!(n(2 * 65536 + 2, Model::TwoDfa), 6);
    assert_eq!(n(512, Model::TwoNfa), 4);
    let r = lower_bound(false, 65536, Model::TwoDfa).unwrap();
    assert_eq!((r.states, r.floor), (6, 4.0));
    assert!(r.meets_floor);
    assert!(min_states(&BigUint::from(1u32), Model::TwoDfa).is_err());
}

proptest! {
    #[test]
    fn calculator_is_monotone(a in 2u64..1_000_000, b in 2u64..1_000_000, pick in 0usize..3) {
        let model = [Model::TwoDfa, Model::TwoNfa, Model::TwoPfa { b: 1 }][pick];
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(min_states(&BigUint::from(lo), model).unwrap() <= min_states(&BigUint::from(hi), model).unwrap());
    }
}
