use super::*;
use crate::automata::{Amplitude, Config};
use crate::engine::{analyze_exact, round_analysis, EngineOptions};
use crate::numerics::{pow2_inv, rat, Prob};

fn opts() -> EngineOptions {
    EngineOptions::default()
}

fn reject_total(card: &MachineCard, w: &str) -> Prob {
    analyze_exact(&card.machine, w, &opts()).unwrap().reject_prob().clone()
}

fn accepts_surely(card: &MachineCard, w: &str) -> bool {
    let s = analyze_exact(&card.machine, w, &opts()).unwrap();
    s.accept_prob().is_exact_one() && s.reject_prob().is_exact_zero()
}

#[test]
fn epsilon_range_is_enforced() {
    assert!(matches!(build_length_checker(3, &rat(1, 2)), Err(MachineError::Epsilon(_))));
    assert!(matches!(build_eq_checker(&rat(0, 1)), Err(MachineError::Epsilon(_))));
    assert!(build_twin_recognizer(&rat(49, 100)).is_ok());
}

#[test]
fn length_checker_card() {
    let c = build_length_checker(3, &rat(1, 4)).unwrap();
    assert_eq!(c.coin_flips, vec![3]);
    assert_eq!((c.qs, c.cs), (2, 12 + 2 * 3));
    assert_eq!(c.cs, c.machine.classical_count());
    assert!(accepts_surely(&c, "aaa"));
}

#[test]
fn length_checker_per_round_probabilities() {
    let c = build_length_checker(3, &rat(1, 4)).unwrap();
    let r = round_analysis(&c.machine, "aaaa", &opts()).unwrap();
    assert!(r.p_reject.certainly_ge(&rat(1, 3)));
    // P_a = 2^-k / (n+1)^2
    assert_eq!(r.p_accept, Prob::exact(pow2_inv(3) * rat(1, 25)));
    let c = build_length_checker(4, &rat(1, 4)).unwrap();
    assert!(reject_total(&c, "aa").certainly_ge(&rat(3, 4)));
}

#[test]
fn eq_checker_examples() {
    let c = build_eq_checker(&rat(1, 4)).unwrap();
    assert_eq!((c.qs, c.cs), (2, 13 + 2 * 3));
    assert!(accepts_surely(&c, "aabb"));
    assert!(reject_total(&c, "aba").is_exact_one());
    assert!(reject_total(&c, "aab").certainly_ge(&rat(3, 4)));
}

#[test]
fn twin_examples() {
    let c = build_twin_recognizer(&rat(1, 8)).unwrap();
    assert_eq!((c.qs, c.cs, c.coin_flips[0]), (3, 13 + 6, 3));
    assert!(accepts_surely(&c, "abcab"));
    assert!(reject_total(&c, "ab").is_exact_one());
    let r = round_analysis(&c.machine, "acb", &opts()).unwrap();
    let pr = r.p_reject.as_exact().expect("five-adic rounds are exact").clone();
    assert!(pr >= rat(1, 25));
}

#[test]
fn exact_length_examples() {
    let c = build_exact_length_checker(3, &rat(1, 4)).unwrap();
    assert!(accepts_surely(&c, "aba"));
    assert!(reject_total(&c, "abab").certainly_ge(&rat(3, 4)));
    let long = "ab".repeat(50);
    assert!(reject_total(&c, &long).certainly_ge(&rat(3, 4)));
    assert!(reject_total(&c, "").certainly_ge(&rat(3, 4)));
}

#[test]
fn intersection_accounting() {
    let eq = build_eq_checker(&rat(1, 8)).unwrap();
    let len = build_length_checker(4, &rat(1, 8)).unwrap();
    let c = intersect(&eq, &len).unwrap();
    assert_eq!(c.epsilon, rat(15, 64));
    assert_eq!(c.qs, 4);
    assert_eq!(c.cs_formula, Some(eq.cs + eq.qs + len.cs));
    assert_eq!(c.cs, c.cs_formula.unwrap());
    let twin = build_twin_recognizer(&rat(1, 8)).unwrap();
    assert!(matches!(intersect(&eq, &twin), Err(MachineError::Alphabet(_))));
}

#[test]
fn self_intersection_keeps_yes_instances() {
    let eq = build_eq_checker(&rat(1, 4)).unwrap();
    let c = intersect(&eq, &eq).unwrap();
    for w in ["", "ab", "aabb"] {
        assert!(accepts_surely(&c, w), "{w}");
    }
}

#[test]
fn aeq_examples() {
    let c = build_aeq_solver(2, &rat(1, 4)).unwrap();
    assert_eq!(c.id, "aeq(m=2)");
    assert_eq!(c.qs, 4);
    assert!(accepts_surely(&c, "aabb"));
    assert!(reject_total(&c, "abab").certainly_ge(&rat(3, 4)));
    assert_eq!(classify(Family::Aeq(2), "a").unwrap(), Classification::OutsidePromise);
}

#[test]
fn twin_m_examples() {
    let c = build_twin_m_recognizer(1, &rat(1, 4)).unwrap();
    assert!(accepts_surely(&c, "aca"));
    assert!(reject_total(&c, "acb").certainly_ge(&rat(3, 4)));
    let c = build_twin_m_recognizer(2, &rat(1, 4)).unwrap();
    assert!(reject_total(&c, "acaca").certainly_ge(&rat(3, 4)));
}

#[test]
fn classification_examples() {
    assert_eq!(classify(Family::Aeq(3), "aaabbb").unwrap(), Classification::Yes);
    assert_eq!(classify(Family::Length(4), "aa").unwrap(), Classification::No);
    assert_eq!(classify(Family::Length(4), "a").unwrap(), Classification::OutsidePromise);
    assert_eq!(classify(Family::TwinM(2), "abcab").unwrap(), Classification::Yes);
    assert_eq!(classify(Family::TwinM(2), "acaca").unwrap(), Classification::No);
    assert_eq!(classify(Family::Leq, "").unwrap(), Classification::Yes);
    assert!(matches!(classify(Family::Leq, "abc"), Err(MachineError::Alphabet(_))));
}

#[test]
fn family_names_round_trip() {
    for f in [Family::Length(3), Family::Aeq(2), Family::Leq, Family::Twin, Family::TwinM(4), Family::ExactLength(5)] {
        assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
    }
    assert!(Family::parse("aeq", None).is_err());
    assert!(Family::parse("nope", Some(1)).is_err());
}

#[test]
fn rotation_index_cancels_at_right_end() {
    let c = build_length_checker(5, &rat(1, 4)).unwrap();
    let m = &c.machine;
    let w = "abbab";
    let tape = m.tape(w).unwrap();
    let mut cfg = Config::initial(m);
    for _ in 0..=w.len() {
        let next = crate::automata::successors(&cfg, m, &tape, 64).unwrap();
        assert_eq!(next.len(), 1);
        cfg = next.into_iter().next().unwrap().0;
    }
    assert_eq!(m.state_name(cfg.classical), "sweep");
    assert_eq!(cfg.quantum, Amplitude::Rotor { block: 0, turns: 0, quarter: 0 });
}

#[test]
fn cards_serialize() {
    let c = build_aeq_solver(1, &rat(1, 4)).unwrap();
    let v: serde_json::Value = serde_json::to_value(&c).unwrap();
    assert_eq!(v["epsilon"], "15/64");
    assert_eq!(v["qs"], 4);
}
