use super::amplitude::{Amplitude, BlockInfo};
use crate::numerics::Generator;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// Left endmarker of the tape.
pub const LEFT_END: char = '¢';
/// Right endmarker of the tape.
pub const RIGHT_END: char = '$';

/// Which exact representation a quantum block uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Two basis states; the state is a real rotation angle kept as an
    /// integer number of `√2·π` turns plus a multiple of `π/4`.
    Rotor,
    /// Three basis states with amplitudes in `ℤ[1/5]`.
    FiveAdic,
    /// Any dimension; certified interval amplitudes.
    Dense,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Rotor => "rotor",
            Backend::FiveAdic => "five-adic",
            Backend::Dense => "dense",
        })
    }
}

/// A group of quantum basis states sharing one backend. The machine's
/// quantum space is the direct sum of its blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumBlock {
    pub backend: Backend,
    pub states: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operator {
    Identity,
    /// Rotation of the first two states of `block` by `turns·√2·π`.
    Rotate { block: usize, turns: i64 },
    /// Hadamard on the first two states of `block`.
    Hadamard { block: usize },
    /// The real matrix `rows / scale` acting on `block`.
    Matrix { block: usize, rows: Vec<Vec<i64>>, scale: i64 },
    /// Exchanges two basis states (possibly in different blocks).
    Swap { a: String, b: String },
}

/// Classical successor: next state and head move in `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub next: String,
    pub head: i8,
}

impl Move {
    pub fn new(next: impl Into<String>, head: i8) -> Self {
        Move { next: next.into(), head }
    }
}

/// Projector onto the span of the listed basis states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projector {
    pub label: String,
    pub states: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Unitary { operator: Operator, then: Move },
    Measure { projectors: Vec<Projector>, outcomes: BTreeMap<String, Move> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub state: String,
    pub symbol: char,
    pub action: Action,
}

/// Serializable description of a 2QCFA: quantum states (grouped in blocks),
/// classical states, input alphabet, the combined Θ/δ rule table, initial
/// states and the halting sets. `round_start` lists the classical states at
/// which the outer repeat loop restarts; engines use them to cut the run
/// into rounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineSpec {
    pub name: String,
    pub quantum: Vec<QuantumBlock>,
    pub classical_states: Vec<String>,
    pub input_alphabet: Vec<char>,
    pub initial_quantum: String,
    pub initial_classical: String,
    pub accepting: Vec<String>,
    pub rejecting: Vec<String>,
    #[serde(default)]
    pub round_start: Vec<String>,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("halting sets overlap: {0}")]
    HaltingOverlap(String),
    #[error("unknown {kind} state {name:?}")]
    UnknownState { kind: &'static str, name: String },
    #[error("duplicate {kind} state {name:?}")]
    DuplicateState { kind: &'static str, name: String },
    #[error("partial transition: no rule for state {state:?} on {symbol:?}")]
    Partial { state: String, symbol: char },
    #[error("duplicate rule for state {state:?} on {symbol:?}")]
    DuplicateRule { state: String, symbol: char },
    #[error("symbol {symbol:?} in rule for {state:?} is not a tape symbol")]
    UnknownSymbol { state: String, symbol: char },
    #[error("U†U ≠ I for the operator of rule ({state}, {symbol})")]
    NonUnitary { state: String, symbol: char },
    #[error("incomplete measurement in rule ({state}, {symbol}): {detail}")]
    IncompleteMeasurement { state: String, symbol: char, detail: String },
    #[error("measurement outcome {label:?} in rule ({state}, {symbol}) has no δ entry")]
    MissingOutcome { state: String, symbol: char, label: String },
    #[error("head move {head} off the tape in rule ({state}, {symbol})")]
    HeadOffTape { state: String, symbol: char, head: i8 },
    #[error("operator in rule ({state}, {symbol}) unsupported by the {backend} backend: {detail}")]
    Unsupported { state: String, symbol: char, backend: Backend, detail: String },
    #[error("bad alphabet: {0}")]
    Alphabet(String),
    #[error("bad quantum block: {0}")]
    Block(String),
}

/// A validated operator with names resolved to indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Identity,
    Rotate { block: usize, turns: i64 },
    Hadamard { block: usize },
    Generator { block: usize, g: Generator },
    /// A signed 2×2 permutation on a rotor block: `swap` when the matrix is
    /// off-diagonal, `reflect` when it maps the angle `θ` to `c − θ`.
    SignedPermutation { block: usize, swap: bool, reflect: bool },
    Matrix { block: usize, rows: Vec<Vec<i64>>, scale: i64 },
    Swap(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub next: usize,
    pub head: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub label: String,
    pub basis: Vec<usize>,
    pub then: Step,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompiledAction {
    Unitary(Op, Step),
    Measure(Vec<Outcome>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Halt {
    Accept,
    Reject,
}

/// A validated machine. Immutable; all lookups are by index.
#[derive(Clone, Debug)]
pub struct QcfaMachine {
    spec: MachineSpec,
    blocks: Vec<BlockInfo>,
    qindex: HashMap<String, usize>,
    sindex: HashMap<String, usize>,
    symbols: Vec<char>,
    sym_index: HashMap<char, usize>,
    halting: Vec<Option<Halt>>,
    round_start: Vec<bool>,
    table: Vec<Option<CompiledAction>>,
    initial_q: usize,
    initial_s: usize,
}

fn index_names(
    names: &[String],
    kind: &'static str,
    errors: &mut Vec<ValidationError>,
) -> HashMap<String, usize> {
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i).is_some() {
            errors.push(ValidationError::DuplicateState { kind, name: n.clone() });
        }
    }
    map
}

fn is_orthogonal_scaled(rows: &[Vec<i64>], scale: i64) -> bool {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) || scale <= 0 {
        return false;
    }
    for i in 0..d {
        for j in 0..d {
            let dot: i128 = (0..d).map(|k| rows[k][i] as i128 * rows[k][j] as i128).sum();
            let want = if i == j { scale as i128 * scale as i128 } else { 0 };
            if dot != want {
                return false;
            }
        }
    }
    true
}

impl MachineSpec {
    /// Checks every structural invariant and compiles the rule table.
    /// Returns all violations found, not just the first.
    pub fn validate(&self) -> Result<QcfaMachine, Vec<ValidationError>> {
        let mut errors = Vec::new();

        // quantum blocks
        let mut blocks = Vec::new();
        let mut qnames = Vec::new();
        for (bi, b) in self.quantum.iter().enumerate() {
            let dim = b.states.len();
            let ok = match b.backend {
                Backend::Rotor => dim == 2,
                Backend::FiveAdic => dim == 3,
                Backend::Dense => dim >= 1,
            };
            if !ok {
                errors.push(ValidationError::Block(format!(
                    "block {bi} has {dim} states, not allowed for the {} backend",
                    b.backend
                )));
            }
            blocks.push(BlockInfo { backend: b.backend, offset: qnames.len(), dim });
            qnames.extend(b.states.iter().cloned());
        }
        if qnames.is_empty() {
            errors.push(ValidationError::Block("no quantum states".into()));
        }
        let qindex = index_names(&qnames, "quantum", &mut errors);
        let sindex = index_names(&self.classical_states, "classical", &mut errors);

        // alphabet
        let mut symbols = vec![LEFT_END, RIGHT_END];
        for &c in &self.input_alphabet {
            if c == LEFT_END || c == RIGHT_END {
                errors.push(ValidationError::Alphabet(format!("{c:?} is reserved for endmarkers")));
            } else if symbols.contains(&c) {
                errors.push(ValidationError::Alphabet(format!("{c:?} listed twice")));
            } else {
                symbols.push(c);
            }
        }
        let sym_index: HashMap<char, usize> = symbols.iter().enumerate().map(|(i, &c)| (c, i)).collect();

        let lookup_s = |name: &str, errors: &mut Vec<ValidationError>| -> Option<usize> {
            let r = sindex.get(name).copied();
            if r.is_none() {
                errors.push(ValidationError::UnknownState { kind: "classical", name: name.to_string() });
            }
            r
        };
        let lookup_q = |name: &str, errors: &mut Vec<ValidationError>| -> Option<usize> {
            let r = qindex.get(name).copied();
            if r.is_none() {
                errors.push(ValidationError::UnknownState { kind: "quantum", name: name.to_string() });
            }
            r
        };

        // halting sets
        let ns = self.classical_states.len();
        let mut halting = vec![None; ns];
        for n in &self.accepting {
            if let Some(i) = lookup_s(n, &mut errors) {
                halting[i] = Some(Halt::Accept);
            }
        }
        let mut overlap = Vec::new();
        for n in &self.rejecting {
            if let Some(i) = lookup_s(n, &mut errors) {
                if halting[i] == Some(Halt::Accept) {
                    overlap.push(n.clone());
                }
                halting[i] = Some(Halt::Reject);
            }
        }
        if !overlap.is_empty() {
            errors.push(ValidationError::HaltingOverlap(overlap.join(", ")));
        }
        let mut round_start = vec![false; ns];
        for n in &self.round_start {
            if let Some(i) = lookup_s(n, &mut errors) {
                round_start[i] = true;
            }
        }
        let initial_q = lookup_q(&self.initial_quantum, &mut errors).unwrap_or(0);
        let initial_s = lookup_s(&self.initial_classical, &mut errors).unwrap_or(0);

        // rule table
        let nsym = symbols.len();
        let mut table: Vec<Option<CompiledAction>> = vec![None; ns * nsym];
        for rule in &self.rules {
            let (state, symbol) = (&rule.state, rule.symbol);
            let Some(si) = lookup_s(state, &mut errors) else { continue };
            let Some(&yi) = sym_index.get(&symbol) else {
                errors.push(ValidationError::UnknownSymbol { state: state.clone(), symbol });
                continue;
            };
            let compile_move = |m: &Move, errors: &mut Vec<ValidationError>| -> Option<Step> {
                let next = lookup_s(&m.next, errors)?;
                let off = !(-1..=1).contains(&m.head)
                    || (symbol == LEFT_END && m.head < 0)
                    || (symbol == RIGHT_END && m.head > 0);
                if off {
                    errors.push(ValidationError::HeadOffTape { state: state.clone(), symbol, head: m.head });
                    return None;
                }
                Some(Step { next, head: m.head })
            };
            let compiled = match &rule.action {
                Action::Unitary { operator, then } => {
                    let op = compile_operator(operator, &blocks, &qindex, state, symbol, &mut errors);
                    let mv = compile_move(then, &mut errors);
                    match (op, mv) {
                        (Some(op), Some(mv)) => Some(CompiledAction::Unitary(op, mv)),
                        _ => None,
                    }
                }
                Action::Measure { projectors, outcomes } => {
                    let mut seen: BTreeMap<usize, String> = BTreeMap::new();
                    let mut labels = BTreeSet::new();
                    let mut compiled = Vec::new();
                    let mut ok = true;
                    for p in projectors {
                        if !labels.insert(p.label.clone()) {
                            errors.push(ValidationError::IncompleteMeasurement {
                                state: state.clone(),
                                symbol,
                                detail: format!("label {:?} used twice", p.label),
                            });
                            ok = false;
                        }
                        if p.states.is_empty() {
                            errors.push(ValidationError::IncompleteMeasurement {
                                state: state.clone(),
                                symbol,
                                detail: format!("projector {:?} is empty", p.label),
                            });
                            ok = false;
                        }
                        let mut basis = Vec::new();
                        for q in &p.states {
                            let Some(qi) = lookup_q(q, &mut errors) else {
                                ok = false;
                                continue;
                            };
                            if let Some(prev) = seen.insert(qi, p.label.clone()) {
                                errors.push(ValidationError::IncompleteMeasurement {
                                    state: state.clone(),
                                    symbol,
                                    detail: format!("projectors {prev:?} and {:?} overlap on {q:?}", p.label),
                                });
                                ok = false;
                            }
                            basis.push(qi);
                        }
                        basis.sort_unstable();
                        match outcomes.get(&p.label) {
                            Some(m) => match compile_move(m, &mut errors) {
                                Some(then) => compiled.push(Outcome { label: p.label.clone(), basis, then }),
                                None => ok = false,
                            },
                            None => {
                                errors.push(ValidationError::MissingOutcome {
                                    state: state.clone(),
                                    symbol,
                                    label: p.label.clone(),
                                });
                                ok = false;
                            }
                        }
                    }
                    let missing: Vec<&String> =
                        qnames.iter().enumerate().filter(|(i, _)| !seen.contains_key(i)).map(|(_, n)| n).collect();
                    if !missing.is_empty() {
                        errors.push(ValidationError::IncompleteMeasurement {
                            state: state.clone(),
                            symbol,
                            detail: format!("projectors do not sum to I; missing {missing:?}"),
                        });
                        ok = false;
                    }
                    for label in outcomes.keys() {
                        if !labels.contains(label) {
                            errors.push(ValidationError::IncompleteMeasurement {
                                state: state.clone(),
                                symbol,
                                detail: format!("δ names outcome {label:?} with no projector"),
                            });
                            ok = false;
                        }
                    }
                    ok.then_some(CompiledAction::Measure(compiled))
                }
            };
            let slot = &mut table[si * nsym + yi];
            if slot.is_some() {
                errors.push(ValidationError::DuplicateRule { state: state.clone(), symbol });
            } else if let Some(c) = compiled {
                *slot = Some(c);
            } else {
                // keep the slot marked so totality does not double-report
                *slot = Some(CompiledAction::Measure(Vec::new()));
            }
        }

        // totality over non-halting states
        for (si, name) in self.classical_states.iter().enumerate() {
            if halting[si].is_some() {
                continue;
            }
            for (yi, &c) in symbols.iter().enumerate() {
                if table[si * nsym + yi].is_none() {
                    errors.push(ValidationError::Partial { state: name.clone(), symbol: c });
                }
            }
        }

        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(QcfaMachine {
            spec: self.clone(),
            blocks,
            qindex,
            sindex,
            symbols,
            sym_index,
            halting,
            round_start,
            table,
            initial_q,
            initial_s,
        })
    }
}

fn compile_operator(
    op: &Operator,
    blocks: &[BlockInfo],
    qindex: &HashMap<String, usize>,
    state: &str,
    symbol: char,
    errors: &mut Vec<ValidationError>,
) -> Option<Op> {
    let unsupported = |backend: Backend, detail: &str, errors: &mut Vec<ValidationError>| {
        errors.push(ValidationError::Unsupported {
            state: state.to_string(),
            symbol,
            backend,
            detail: detail.to_string(),
        });
    };
    let block_ok = |b: usize, errors: &mut Vec<ValidationError>| -> Option<BlockInfo> {
        let r = blocks.get(b).copied();
        if r.is_none() {
            errors.push(ValidationError::Block(format!("operator refers to missing block {b}")));
        }
        r
    };
    match op {
        Operator::Identity => Some(Op::Identity),
        Operator::Rotate { block, turns } => {
            let info = block_ok(*block, errors)?;
            if info.backend == Backend::FiveAdic || info.dim < 2 {
                unsupported(info.backend, "irrational rotation", errors);
                return None;
            }
            Some(Op::Rotate { block: *block, turns: *turns })
        }
        Operator::Hadamard { block } => {
            let info = block_ok(*block, errors)?;
            if info.dim < 2 {
                unsupported(info.backend, "Hadamard needs two states", errors);
                return None;
            }
            Some(Op::Hadamard { block: *block })
        }
        Operator::Matrix { block, rows, scale } => {
            let info = block_ok(*block, errors)?;
            if rows.len() != info.dim || rows.iter().any(|r| r.len() != info.dim) {
                errors.push(ValidationError::Block(format!(
                    "matrix shape does not match block {block} of dimension {}",
                    info.dim
                )));
                return None;
            }
            if !is_orthogonal_scaled(rows, *scale) {
                errors.push(ValidationError::NonUnitary { state: state.to_string(), symbol });
                return None;
            }
            match info.backend {
                Backend::FiveAdic => {
                    if *scale != 5 {
                        unsupported(info.backend, "scale must be 5", errors);
                        return None;
                    }
                    match Generator::from_rows(rows) {
                        Ok(g) => Some(Op::Generator { block: *block, g }),
                        Err(_) => {
                            unsupported(info.backend, "not one of A, B, Aᵀ, Bᵀ", errors);
                            None
                        }
                    }
                }
                Backend::Rotor => {
                    // orthogonal with integer entries over scale ⇒ check for a signed permutation
                    let s = *scale;
                    let r = rows;
                    let diag = r[0][1] == 0 && r[1][0] == 0 && r[0][0].abs() == s && r[1][1].abs() == s;
                    let anti = r[0][0] == 0 && r[1][1] == 0 && r[0][1].abs() == s && r[1][0].abs() == s;
                    if diag {
                        // ±I keeps the angle, ±Z reflects it
                        Some(Op::SignedPermutation { block: *block, swap: false, reflect: r[0][0] != r[1][1] })
                    } else if anti {
                        // ±X reflects about π/4; the rotation by π/2 does not reflect
                        Some(Op::SignedPermutation { block: *block, swap: true, reflect: r[0][1] == r[1][0] })
                    } else {
                        unsupported(info.backend, "only signed permutations are exact on a rotor", errors);
                        None
                    }
                }
                Backend::Dense => Some(Op::Matrix { block: *block, rows: rows.clone(), scale: *scale }),
            }
        }
        Operator::Swap { a, b } => {
            let ia = qindex.get(a).copied();
            let ib = qindex.get(b).copied();
            for (n, i) in [(a, ia), (b, ib)] {
                if i.is_none() {
                    errors.push(ValidationError::UnknownState { kind: "quantum", name: n.clone() });
                }
            }
            Some(Op::Swap(ia?, ib?))
        }
    }
}

impl QcfaMachine {
    pub fn spec(&self) -> &MachineSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn blocks(&self) -> &[BlockInfo] {
        &self.blocks
    }

    pub fn quantum_count(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    pub fn classical_count(&self) -> usize {
        self.spec.classical_states.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.spec.classical_states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.sindex.get(name).copied()
    }

    pub fn quantum_index(&self, name: &str) -> Option<usize> {
        self.qindex.get(name).copied()
    }

    pub fn quantum_name(&self, q: usize) -> &str {
        let b = self.blocks.iter().rposition(|b| b.offset <= q).expect("index in range");
        &self.spec.quantum[b].states[q - self.blocks[b].offset]
    }

    pub fn input_alphabet(&self) -> &[char] {
        &self.symbols[2..]
    }

    /// Tape alphabet `[¢, $, Σ...]`.
    pub fn tape_alphabet(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol_index(&self, c: char) -> Option<usize> {
        self.sym_index.get(&c).copied()
    }

    pub fn halting(&self, s: usize) -> Option<Halt> {
        self.halting[s]
    }

    pub fn is_round_start(&self, s: usize) -> bool {
        self.round_start[s]
    }

    pub fn initial_classical(&self) -> usize {
        self.initial_s
    }

    pub fn initial_quantum(&self) -> usize {
        self.initial_q
    }

    pub fn initial_amplitude(&self) -> Amplitude {
        Amplitude::basis(&self.blocks, self.initial_q)
    }

    /// The compiled Θ/δ entry for a non-halting state and tape symbol index.
    pub fn action(&self, s: usize, symbol: usize) -> Option<&CompiledAction> {
        self.table[s * self.symbols.len() + symbol].as_ref()
    }

    /// Groups input symbols that every state treats identically; the
    /// machine's behaviour on a word depends only on the class sequence.
    pub fn symbol_classes(&self) -> HashMap<char, char> {
        let n = self.symbols.len();
        let mut rep: HashMap<char, char> = HashMap::new();
        for i in 2..n {
            let ci = self.symbols[i];
            let found = (2..i).find(|&j| {
                (0..self.classical_count()).all(|s| self.table[s * n + i] == self.table[s * n + j])
            });
            let r = match found {
                Some(j) => rep[&self.symbols[j]],
                None => ci,
            };
            rep.insert(ci, r);
        }
        rep
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.spec).expect("machine specs always serialize")
    }
}
