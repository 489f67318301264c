use super::amplitude::Amplitude;
use super::machine::{CompiledAction, Halt, QcfaMachine, LEFT_END, RIGHT_END};
use super::StepError;
use crate::numerics::{Prob, DEFAULT_PRECISION};
use serde::Serialize;

/// The input with both endmarkers materialised: position 0 is `¢`,
/// positions `1..=n` the input, `n+1` is `$`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tape {
    word: String,
    cells: Vec<usize>,
    chars: Vec<char>,
}

impl Tape {
    pub fn new(machine: &QcfaMachine, word: &str) -> Result<Tape, StepError> {
        let mut chars = vec![LEFT_END];
        chars.extend(word.chars());
        chars.push(RIGHT_END);
        let mut cells = Vec::with_capacity(chars.len());
        for (i, &c) in chars.iter().enumerate() {
            let inner = i > 0 && i + 1 < chars.len();
            let idx = machine.symbol_index(c).filter(|&k| !inner || k >= 2);
            cells.push(idx.ok_or(StepError::SymbolNotInAlphabet(c))?);
        }
        Ok(Tape { word: word.to_string(), cells, chars })
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    /// Number of input symbols `n`.
    pub fn input_len(&self) -> usize {
        self.cells.len() - 2
    }

    /// Index of the last tape cell (`n+1`).
    pub fn last(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn symbol_index(&self, pos: usize) -> usize {
        self.cells[pos]
    }

    pub fn symbol(&self, pos: usize) -> char {
        self.chars[pos]
    }
}

/// Classical state, head position and quantum state: everything that
/// determines the future of a run.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Config {
    pub classical: usize,
    pub head: usize,
    pub quantum: Amplitude,
}

impl Config {
    pub fn initial(machine: &QcfaMachine) -> Config {
        Config { classical: machine.initial_classical(), head: 0, quantum: machine.initial_amplitude() }
    }

    pub fn halting(&self, machine: &QcfaMachine) -> Option<Halt> {
        machine.halting(self.classical)
    }
}

/// One element of the evolving distribution over configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub config: Config,
    pub weight: Prob,
    pub steps: u64,
}

impl Branch {
    pub fn initial(machine: &QcfaMachine) -> Branch {
        Branch { config: Config::initial(machine), weight: Prob::one(), steps: 0 }
    }
}

fn moved(head: usize, d: i8, tape: &Tape) -> Result<usize, StepError> {
    let h = head as i64 + d as i64;
    if h < 0 || h as usize > tape.last() {
        return Err(StepError::HeadOutOfRange(h));
    }
    Ok(h as usize)
}

/// One application of Θ followed by δ: the successor configurations with
/// their transition probabilities (which sum to one).
pub fn successors(
    config: &Config,
    machine: &QcfaMachine,
    tape: &Tape,
    precision: u32,
) -> Result<Vec<(Config, Prob)>, StepError> {
    if let Some(h) = machine.halting(config.classical) {
        return Err(StepError::Halted(h));
    }
    let sym = tape.symbol_index(config.head);
    let action = machine.action(config.classical, sym).ok_or_else(|| StepError::NoRule {
        state: machine.state_name(config.classical).to_string(),
        symbol: tape.symbol(config.head),
    })?;
    match action {
        CompiledAction::Unitary(op, then) => {
            let quantum = config.quantum.apply(op, machine.blocks())?;
            let head = moved(config.head, then.head, tape)?;
            Ok(vec![(Config { classical: then.next, head, quantum }, Prob::one())])
        }
        CompiledAction::Measure(outcomes) => {
            let sets: Vec<&[usize]> = outcomes.iter().map(|o| o.basis.as_slice()).collect();
            let results = config.quantum.measure(&sets, machine.blocks(), precision)?;
            let mut out = Vec::with_capacity(results.len());
            for (k, p, quantum) in results {
                let then = outcomes[k].then;
                let head = moved(config.head, then.head, tape)?;
                out.push((Config { classical: then.next, head, quantum }, p));
            }
            Ok(out)
        }
    }
}

/// Advances a branch by one step at the default precision.
pub fn step(branch: &Branch, machine: &QcfaMachine, tape: &Tape) -> Result<Vec<(Branch, Prob)>, StepError> {
    step_with_precision(branch, machine, tape, DEFAULT_PRECISION)
}

pub fn step_with_precision(
    branch: &Branch,
    machine: &QcfaMachine,
    tape: &Tape,
    precision: u32,
) -> Result<Vec<(Branch, Prob)>, StepError> {
    Ok(successors(&branch.config, machine, tape, precision)?
        .into_iter()
        .map(|(config, p)| {
            let b = Branch { config, weight: branch.weight.mul(&p), steps: branch.steps + 1 };
            (b, p)
        })
        .collect())
}
