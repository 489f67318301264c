use crate::automata::{
    Action, Backend, MachineSpec, Move, Operator, Projector, QuantumBlock, Rule, LEFT_END, RIGHT_END,
};
use std::collections::BTreeMap;

pub(crate) const ACCEPT: &str = "accept";
pub(crate) const REJECT: &str = "reject";

/// Incremental rule table. Any (state, symbol) pair left unset becomes
/// "do nothing and reject", which keeps the table total without spelling
/// out unreachable combinations.
pub(crate) struct Layout {
    name: String,
    blocks: Vec<QuantumBlock>,
    states: Vec<String>,
    alphabet: Vec<char>,
    round_start: Vec<String>,
    initial: String,
    rules: BTreeMap<(String, char), Action>,
}

pub(crate) fn unitary(op: Operator, next: &str, head: i8) -> Action {
    Action::Unitary { operator: op, then: Move::new(next, head) }
}

pub(crate) fn goto(next: &str, head: i8) -> Action {
    unitary(Operator::Identity, next, head)
}

/// Measurement in the computational basis: one rank-1 projector per listed
/// quantum state.
pub(crate) fn measure(outcomes: &[(&str, &str, i8)]) -> Action {
    Action::Measure {
        projectors: outcomes
            .iter()
            .map(|(q, _, _)| Projector { label: q.to_string(), states: vec![q.to_string()] })
            .collect(),
        outcomes: outcomes.iter().map(|(q, n, h)| (q.to_string(), Move::new(*n, *h))).collect(),
    }
}

impl Layout {
    pub fn new(name: impl Into<String>, backend: Backend, qstates: &[&str], alphabet: &[char]) -> Layout {
        Layout {
            name: name.into(),
            blocks: vec![QuantumBlock { backend, states: qstates.iter().map(|s| s.to_string()).collect() }],
            states: vec![ACCEPT.into(), REJECT.into()],
            alphabet: alphabet.to_vec(),
            round_start: Vec::new(),
            initial: String::new(),
            rules: BTreeMap::new(),
        }
    }

    pub fn state(&mut self, s: &str) -> &mut Self {
        if !self.states.iter().any(|x| x == s) {
            self.states.push(s.to_string());
        }
        self
    }

    pub fn initial(&mut self, s: &str) -> &mut Self {
        self.state(s);
        self.initial = s.to_string();
        self
    }

    pub fn round_start(&mut self, s: &str) -> &mut Self {
        self.state(s);
        self.round_start.push(s.to_string());
        self
    }

    pub fn on(&mut self, s: &str, symbols: &[char], action: Action) -> &mut Self {
        self.state(s);
        for &c in symbols {
            self.rules.insert((s.to_string(), c), action.clone());
        }
        self
    }

    pub fn finish(self) -> MachineSpec {
        let mut tape = vec![LEFT_END, RIGHT_END];
        tape.extend(&self.alphabet);
        let mut rules = Vec::new();
        for s in &self.states {
            if s == ACCEPT || s == REJECT {
                continue;
            }
            for &c in &tape {
                let action = self.rules.get(&(s.clone(), c)).cloned().unwrap_or_else(|| goto(REJECT, 0));
                rules.push(Rule { state: s.clone(), symbol: c, action });
            }
        }
        let q0 = self.blocks[0].states[0].clone();
        MachineSpec {
            name: self.name,
            quantum: self.blocks,
            classical_states: self.states,
            input_alphabet: self.alphabet,
            initial_quantum: q0,
            initial_classical: self.initial,
            accepting: vec![ACCEPT.into()],
            rejecting: vec![REJECT.into()],
            round_start: self.round_start,
            rules,
        }
    }
}

/// Adds `k` coin flips at the current cell: `flip_i` applies a Hadamard,
/// `coin_i` measures; heads (`q1`) continues, tails (`q0`, and any other
/// state listed in `tail_states`) goes to `tails`. After the last head the
/// machine moves by `then_head` into `then`.
pub(crate) fn coin_flips(
    l: &mut Layout,
    k: u32,
    symbols: &[char],
    tail_states: &[&str],
    tails: &str,
    then: &str,
    then_head: i8,
) {
    for i in 1..=k {
        let flip = format!("flip{i}");
        let coin = format!("coin{i}");
        let (next, head) = if i == k { (then.to_string(), then_head) } else { (format!("flip{}", i + 1), 0) };
        l.on(&flip, symbols, unitary(Operator::Hadamard { block: 0 }, &coin, 0));
        let mut outs: Vec<(&str, &str, i8)> = tail_states.iter().map(|q| (*q, tails, 0)).collect();
        outs.push(("q1", &next, head));
        l.on(&coin, symbols, measure(&outs));
    }
}
