use super::*;
use crate::numerics::{rat, Prob};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn unitary(state: &str, symbol: char, operator: Operator, next: &str, head: i8) -> Rule {
    Rule { state: state.into(), symbol, action: Action::Unitary { operator, then: Move::new(next, head) } }
}

fn measure(state: &str, symbol: char, outs: &[(&str, &str, i8)]) -> Rule {
    let projectors = outs.iter().map(|(q, _, _)| Projector { label: q.to_string(), states: vec![q.to_string()] }).collect();
    let outcomes: BTreeMap<String, Move> = outs.iter().map(|(q, n, h)| (q.to_string(), Move::new(*n, *h))).collect();
    Rule { state: state.into(), symbol, action: Action::Measure { projectors, outcomes } }
}

/// Small rotor machine: at `¢` optionally applies H, walks right rotating
/// by one turn per `a`, measures at `$`.
fn walker(hadamard: bool) -> QcfaMachine {
    let mut rules = vec![
        unitary("s", '¢', if hadamard { Operator::Hadamard { block: 0 } } else { Operator::Identity }, "w", 1),
        unitary("w", 'a', Operator::Rotate { block: 0, turns: -1 }, "w", 1),
        unitary("w", 'b', Operator::Identity, "w", 1),
        measure("w", '$', &[("q0", "acc", 0), ("q1", "rej", 0)]),
    ];
    for (s, c) in [("s", 'a'), ("s", 'b'), ("s", '$'), ("w", '¢')] {
        rules.push(unitary(s, c, Operator::Identity, "rej", 0));
    }
    MachineSpec {
        name: "walker".into(),
        quantum: vec![QuantumBlock { backend: Backend::Rotor, states: vec!["q0".into(), "q1".into()] }],
        classical_states: ["s", "w", "acc", "rej"].map(String::from).to_vec(),
        input_alphabet: vec!['a', 'b'],
        initial_quantum: "q0".into(),
        initial_classical: "s".into(),
        accepting: vec!["acc".into()],
        rejecting: vec!["rej".into()],
        round_start: vec!["s".into()],
        rules,
    }
    .validate()
    .expect("walker is well formed")
}

fn run_to_end(m: &QcfaMachine, word: &str) -> Vec<(Config, Prob)> {
    let tape = m.tape(word).unwrap();
    let mut cur = vec![(Config::initial(m), Prob::one())];
    let mut done = Vec::new();
    while let Some((c, w)) = cur.pop() {
        if c.halting(m).is_some() {
            done.push((c, w));
            continue;
        }
        for (n, p) in successors(&c, m, &tape, 128).unwrap() {
            assert!(n.head <= tape.last());
            cur.push((n, w.mul(&p)));
        }
    }
    done
}

#[test]
fn rotation_step_decrements_turns() {
    let m = walker(false);
    let tape = m.tape("a").unwrap();
    let c = Config { classical: m.state_index("w").unwrap(), head: 1, quantum: m.initial_amplitude() };
    let next = successors(&c, &m, &tape, 64).unwrap();
    assert_eq!(next.len(), 1);
    assert!(matches!(next[0].0.quantum, Amplitude::Rotor { turns: -1, quarter: 0, .. }));
    assert_eq!(next[0].0.head, 2);
}

#[test]
fn eigenstate_measurement_is_deterministic() {
    let out = run_to_end(&walker(false), "bb");
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].0.halting(&walker(false)), Some(Halt::Accept));
    assert!(out[0].1.is_exact_one());
}

#[test]
fn hadamard_splits_evenly() {
    let m = walker(true);
    let out = run_to_end(&m, "b");
    assert_eq!(out.len(), 2);
    for (_, w) in &out {
        assert_eq!(w.as_exact(), Some(&rat(1, 2)));
    }
}

#[test]
fn foreign_symbols_and_endmarkers_in_input_are_rejected() {
    let m = walker(false);
    assert_eq!(m.tape("ac").unwrap_err(), StepError::SymbolNotInAlphabet('c'));
    assert_eq!(m.tape("a$").unwrap_err(), StepError::SymbolNotInAlphabet('$'));
}

#[test]
fn stepping_a_halted_config_fails() {
    let m = walker(false);
    let tape = m.tape("").unwrap();
    let c = Config { classical: m.state_index("acc").unwrap(), head: 0, quantum: m.initial_amplitude() };
    assert!(matches!(successors(&c, &m, &tape, 64), Err(StepError::Halted(Halt::Accept))));
}

#[test]
fn branch_weights_multiply() {
    let m = walker(true);
    let tape = m.tape("").unwrap();
    let mut b = vec![Branch::initial(&m)];
    for _ in 0..2 {
        b = b.iter().flat_map(|x| step(x, &m, &tape).unwrap()).map(|(x, _)| x).collect();
    }
    assert_eq!(b.len(), 2);
    assert!(b.iter().all(|x| x.steps == 2 && x.weight.as_exact() == Some(&rat(1, 2))));
}

#[test]
fn spec_json_round_trip() {
    let m = walker(true);
    let back: MachineSpec = serde_json::from_str(&m.to_json()).unwrap();
    assert_eq!(&back, m.spec());
}

#[test]
fn symbol_classes_merge_identical_columns() {
    let mut spec = walker(false).spec().clone();
    spec.input_alphabet.push('c');
    for r in spec.rules.clone() {
        if r.symbol == 'a' {
            spec.rules.push(Rule { symbol: 'c', ..r });
        }
    }
    let m = spec.validate().unwrap();
    let cls = m.symbol_classes();
    assert_eq!(cls[&'c'], 'a');
    assert_eq!(cls[&'b'], 'b');
}

proptest! {
    #[test]
    fn outcome_probabilities_sum_to_one(word in "[ab]{0,6}", h in any::<bool>()) {
        let m = walker(h);
        let out = run_to_end(&m, &word);
        let total = out.iter().fold(Prob::zero(), |acc, (_, w)| acc.add(w));
        prop_assert!(total.contains(&rat(1, 1)), "total {}", total);
    }
}
