//! Builders for the concrete machines, the sequential intersection
//! combinator and the promise classifiers.

mod builders;
mod layout;

pub use builders::{
    build_aeq_solver, build_eq_checker, build_exact_length_checker, build_exact_length_checker_over,
    build_length_checker, build_twin_m_recognizer, build_twin_recognizer, certify_exact_length,
    exact_length_reject_bound, rotation_coin_flips, twin_coin_flips, MATRIX_A, MATRIX_B, MAX_COIN_FLIPS,
};

use crate::automata::{
    Action, MachineSpec, Move, Operator, Projector, QcfaMachine, QuantumBlock, Rule, ValidationError, LEFT_END,
    RIGHT_END,
};
use crate::numerics::{rat, rational_to_string, Rational};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MachineError {
    #[error("error bound {0} is outside (0, 1/2)")]
    Epsilon(String),
    #[error("bad parameter: {0}")]
    Parameter(String),
    #[error("alphabet mismatch: {0}")]
    Alphabet(String),
    #[error("built machine failed validation: {0:?}")]
    Validation(Vec<ValidationError>),
    #[error("certification failed: {0}")]
    Certification(String),
}

/// Requires `0 < ε < 1/2`.
pub fn check_epsilon(eps: &Rational) -> Result<(), MachineError> {
    if *eps > rat(0, 1) && *eps < rat(1, 2) {
        Ok(())
    } else {
        Err(MachineError::Epsilon(rational_to_string(eps)))
    }
}

/// A validated machine together with the numbers it is audited against.
#[derive(Clone, Debug)]
pub struct MachineCard {
    pub machine: QcfaMachine,
    pub id: String,
    /// One-sided error bound.
    pub epsilon: Rational,
    /// Coin flips per round, one entry per component.
    pub coin_flips: Vec<u32>,
    pub qs: usize,
    pub cs: usize,
    /// `CS(A₁) + QS(A₁) + CS(A₂)` for composed machines.
    pub cs_formula: Option<usize>,
    /// Expected-runtime class.
    pub runtime: String,
}

impl MachineCard {
    pub fn from_spec(
        spec: MachineSpec,
        id: String,
        epsilon: Rational,
        coin_flips: Vec<u32>,
        runtime: &str,
        cs_formula: Option<usize>,
    ) -> Result<MachineCard, MachineError> {
        let machine = spec.validate().map_err(MachineError::Validation)?;
        Ok(MachineCard {
            qs: machine.quantum_count(),
            cs: machine.classical_count(),
            machine,
            id,
            epsilon,
            coin_flips,
            cs_formula,
            runtime: runtime.to_string(),
        })
    }

    pub fn renamed(mut self, id: String) -> MachineCard {
        let mut spec = self.machine.spec().clone();
        spec.name = id.clone();
        self.machine = spec.validate().expect("renaming keeps a valid machine valid");
        self.id = id;
        self
    }
}

#[derive(Serialize)]
struct CardDoc<'a> {
    id: &'a str,
    #[serde(with = "crate::numerics::serde_rational")]
    epsilon: &'a Rational,
    coin_flips: &'a [u32],
    qs: usize,
    cs: usize,
    cs_formula: Option<usize>,
    runtime: &'a str,
    machine: &'a MachineSpec,
}

impl Serialize for MachineCard {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CardDoc {
            id: &self.id,
            epsilon: &self.epsilon,
            coin_flips: &self.coin_flips,
            qs: self.qs,
            cs: self.cs,
            cs_formula: self.cs_formula,
            runtime: &self.runtime,
            machine: self.machine.spec(),
        }
        .serialize(s)
    }
}

fn prefixed(p: &str, s: &str) -> String {
    format!("{p}.{s}")
}

fn relabel_operator(op: &Operator, p: &str, shift: usize) -> Operator {
    match op {
        Operator::Identity => Operator::Identity,
        Operator::Rotate { block, turns } => Operator::Rotate { block: block + shift, turns: *turns },
        Operator::Hadamard { block } => Operator::Hadamard { block: block + shift },
        Operator::Matrix { block, rows, scale } => {
            Operator::Matrix { block: block + shift, rows: rows.clone(), scale: *scale }
        }
        Operator::Swap { a, b } => Operator::Swap { a: prefixed(p, a), b: prefixed(p, b) },
    }
}

fn relabel_move(m: &Move, p: &str) -> Move {
    Move::new(prefixed(p, &m.next), m.head)
}

/// Renames states and blocks of one component; every measurement's first
/// projector also absorbs the other component's quantum states so that
/// measurements stay complete over the joint space.
fn relabel_action(a: &Action, p: &str, shift: usize, foreign: &[String]) -> Action {
    match a {
        Action::Unitary { operator, then } => {
            Action::Unitary { operator: relabel_operator(operator, p, shift), then: relabel_move(then, p) }
        }
        Action::Measure { projectors, outcomes } => {
            let mut projectors: Vec<Projector> = projectors
                .iter()
                .map(|pr| Projector {
                    label: pr.label.clone(),
                    states: pr.states.iter().map(|s| prefixed(p, s)).collect(),
                })
                .collect();
            if let Some(first) = projectors.first_mut() {
                first.states.extend(foreign.iter().cloned());
            }
            let outcomes = outcomes.iter().map(|(l, m)| (l.clone(), relabel_move(m, p))).collect();
            Action::Measure { projectors, outcomes }
        }
    }
}

fn quantum_names(spec: &MachineSpec, p: &str) -> Vec<String> {
    spec.quantum.iter().flat_map(|b| b.states.iter().map(|s| prefixed(p, s))).collect()
}

/// Sequential composition recognising `L₁ ∩ L₂`: run the first machine;
/// where it would accept, measure its quantum state, walk back to `¢`,
/// move the collapsed state into the second machine's initial state and
/// run the second machine. Either machine rejecting rejects.
pub fn intersect(c1: &MachineCard, c2: &MachineCard) -> Result<MachineCard, MachineError> {
    let (s1, s2) = (c1.machine.spec(), c2.machine.spec());
    if s1.input_alphabet != s2.input_alphabet {
        return Err(MachineError::Alphabet(format!(
            "{:?} versus {:?}",
            s1.input_alphabet, s2.input_alphabet
        )));
    }
    let q1 = quantum_names(s1, "1");
    let q2 = quantum_names(s2, "2");
    let shift = s1.quantum.len();

    let mut quantum: Vec<QuantumBlock> = Vec::new();
    for (spec, p) in [(s1, "1"), (s2, "2")] {
        for b in &spec.quantum {
            quantum.push(QuantumBlock { backend: b.backend, states: b.states.iter().map(|s| prefixed(p, s)).collect() });
        }
    }

    let mut tape = vec![LEFT_END, RIGHT_END];
    tape.extend(&s1.input_alphabet);

    let handoff = |q: &str| format!("handoff.{q}");
    let mut classical: Vec<String> = s1.classical_states.iter().map(|s| prefixed("1", s)).collect();
    classical.extend(q1.iter().map(|q| handoff(q)));
    classical.extend(s2.classical_states.iter().map(|s| prefixed("2", s)));

    let mut rules = Vec::new();
    for r in &s1.rules {
        rules.push(Rule { state: prefixed("1", &r.state), symbol: r.symbol, action: relabel_action(&r.action, "1", 0, &q2) });
    }
    for r in &s2.rules {
        rules.push(Rule {
            state: prefixed("2", &r.state),
            symbol: r.symbol,
            action: relabel_action(&r.action, "2", shift, &q1),
        });
    }
    // the first machine's accepting states collapse its register
    let collapse = {
        let mut projectors: Vec<Projector> =
            q1.iter().map(|q| Projector { label: q.clone(), states: vec![q.clone()] }).collect();
        projectors[0].states.extend(q2.iter().cloned());
        let outcomes: BTreeMap<String, Move> = q1.iter().map(|q| (q.clone(), Move::new(handoff(q), 0))).collect();
        Action::Measure { projectors, outcomes }
    };
    for a in &s1.accepting {
        for &c in &tape {
            rules.push(Rule { state: prefixed("1", a), symbol: c, action: collapse.clone() });
        }
    }
    let q2_init = prefixed("2", &s2.initial_quantum);
    let c2_init = prefixed("2", &s2.initial_classical);
    for q in &q1 {
        for &c in &tape {
            let action = if c == LEFT_END {
                Action::Unitary {
                    operator: Operator::Swap { a: q.clone(), b: q2_init.clone() },
                    then: Move::new(c2_init.clone(), 0),
                }
            } else {
                Action::Unitary { operator: Operator::Identity, then: Move::new(handoff(q), -1) }
            };
            rules.push(Rule { state: handoff(q), symbol: c, action });
        }
    }

    let mut rejecting: Vec<String> = s1.rejecting.iter().map(|s| prefixed("1", s)).collect();
    rejecting.extend(s2.rejecting.iter().map(|s| prefixed("2", s)));
    let mut round_start: Vec<String> = s1.round_start.iter().map(|s| prefixed("1", s)).collect();
    round_start.extend(s2.round_start.iter().map(|s| prefixed("2", s)));
    let name = format!("{}∩{}", c1.id, c2.id);
    let spec = MachineSpec {
        name: name.clone(),
        quantum,
        classical_states: classical,
        input_alphabet: s1.input_alphabet.clone(),
        initial_quantum: prefixed("1", &s1.initial_quantum),
        initial_classical: prefixed("1", &s1.initial_classical),
        accepting: s2.accepting.iter().map(|s| prefixed("2", s)).collect(),
        rejecting,
        round_start,
        rules,
    };
    let eps = &c1.epsilon + &c2.epsilon - &c1.epsilon * &c2.epsilon;
    let mut ks = c1.coin_flips.clone();
    ks.extend(&c2.coin_flips);
    let runtime = format!("{} + {}", c1.runtime, c2.runtime);
    let formula = c1.cs + c1.qs + c2.cs;
    MachineCard::from_spec(spec, name, eps, ks, &runtime, Some(formula))
}

/// The problem families with a builder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// Promise `|w| = m` versus `|w| ≠ m, |w| ≥ m/2`.
    Length(u64),
    /// Promise `aᵐbᵐ` versus other words of length at least `m`.
    Aeq(u64),
    /// `{aⁿbⁿ}`.
    Leq,
    /// `{xcx : x ∈ {a,b}*}`.
    Twin,
    /// `{xcx : x ∈ {a,b}ᵐ}`.
    TwinM(u64),
    /// `{w : |w| = m}`.
    ExactLength(u64),
}

/// Where a word falls with respect to a promise problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Yes,
    No,
    OutsidePromise,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Yes => "yes",
            Classification::No => "no",
            Classification::OutsidePromise => "outside-promise",
        })
    }
}

impl Family {
    /// Family by name, with `m` required exactly for the parametrised
    /// families. Names: `length`, `aeq`, `leq`, `twin`, `twin-m`,
    /// `exact-length`.
    pub fn parse(name: &str, m: Option<u64>) -> Result<Family, MachineError> {
        let need = |m: Option<u64>| {
            m.filter(|&m| m >= 1)
                .ok_or_else(|| MachineError::Parameter(format!("family {name} needs m ≥ 1")))
        };
        match name {
            "length" | "a" => Ok(Family::Length(need(m)?)),
            "aeq" => Ok(Family::Aeq(need(m)?)),
            "leq" | "eq" => Ok(Family::Leq),
            "twin" => Ok(Family::Twin),
            "twin-m" | "twinm" => Ok(Family::TwinM(need(m)?)),
            "exact-length" => Ok(Family::ExactLength(need(m)?)),
            _ => Err(MachineError::Parameter(format!("unknown family {name:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Length(_) => "length",
            Family::Aeq(_) => "aeq",
            Family::Leq => "leq",
            Family::Twin => "twin",
            Family::TwinM(_) => "twin-m",
            Family::ExactLength(_) => "exact-length",
        }
    }

    pub fn m(&self) -> Option<u64> {
        match *self {
            Family::Length(m) | Family::Aeq(m) | Family::TwinM(m) | Family::ExactLength(m) => Some(m),
            Family::Leq | Family::Twin => None,
        }
    }

    pub fn alphabet(&self) -> &'static [char] {
        match self {
            Family::Twin | Family::TwinM(_) => &['a', 'b', 'c'],
            _ => &['a', 'b'],
        }
    }

    pub fn build(&self, eps: &Rational) -> Result<MachineCard, MachineError> {
        match *self {
            Family::Length(m) => build_length_checker(m, eps),
            Family::Aeq(m) => build_aeq_solver(m, eps),
            Family::Leq => build_eq_checker(eps),
            Family::Twin => build_twin_recognizer(eps),
            Family::TwinM(m) => build_twin_m_recognizer(m, eps),
            Family::ExactLength(m) => build_exact_length_checker(m, eps),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.m() {
            Some(m) => write!(f, "{}(m={m})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

impl FromStr for Family {
    type Err = MachineError;

    /// Accepts `name` or `name(m=..)`, as produced by `Display`.
    fn from_str(s: &str) -> Result<Family, MachineError> {
        match s.strip_suffix(')').and_then(|t| t.split_once("(m=")) {
            Some((name, m)) => {
                let m = m.parse().map_err(|_| MachineError::Parameter(format!("bad m in {s:?}")))?;
                Family::parse(name, Some(m))
            }
            None => Family::parse(s, None),
        }
    }
}

fn is_twin(w: &str) -> Option<usize> {
    let (x, y) = w.split_once('c')?;
    (x == y && !x.contains('c')).then_some(x.len())
}

fn is_anbn(w: &str, n: Option<usize>) -> bool {
    let len = w.len();
    if len % 2 != 0 || n.is_some_and(|n| len != 2 * n) {
        return false;
    }
    let (a, b) = w.split_at(len / 2);
    a.bytes().all(|c| c == b'a') && b.bytes().all(|c| c == b'b')
}

/// Direct set-membership classification of `word` for `family`.
pub fn classify(family: Family, word: &str) -> Result<Classification, MachineError> {
    let sigma = family.alphabet();
    if let Some(c) = word.chars().find(|c| !sigma.contains(c)) {
        return Err(MachineError::Alphabet(format!("symbol {c:?} is not in {sigma:?}")));
    }
    let n = word.len() as u64;
    let yes_no = |b: bool| if b { Classification::Yes } else { Classification::No };
    Ok(match family {
        Family::Length(m) if n == m => Classification::Yes,
        Family::Length(m) if 2 * n >= m => Classification::No,
        Family::Length(_) => Classification::OutsidePromise,
        Family::Aeq(m) if is_anbn(word, Some(m as usize)) => Classification::Yes,
        Family::Aeq(m) if n >= m => Classification::No,
        Family::Aeq(_) => Classification::OutsidePromise,
        Family::Leq => yes_no(is_anbn(word, None)),
        Family::Twin => yes_no(is_twin(word).is_some()),
        Family::TwinM(m) => yes_no(is_twin(word) == Some(m as usize)),
        Family::ExactLength(m) => yes_no(n == m),
    })
}

#[cfg(test)]
mod tests;
