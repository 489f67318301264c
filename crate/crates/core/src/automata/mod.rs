//! Machine descriptions, the exact quantum state representation, single
//! steps of a run, and plain DFAs.

mod amplitude;
mod dfa;
mod machine;
mod step;

pub use amplitude::{Amplitude, BlockInfo};
pub use dfa::{minimize_dfa, run_dfa, words_up_to, Dfa, DfaError, DfaSpec};
pub use machine::{
    Action, Backend, CompiledAction, Halt, MachineSpec, Move, Op, Operator, Outcome, Projector,
    QcfaMachine, QuantumBlock, Rule, Step, ValidationError, LEFT_END, RIGHT_END,
};
pub use step::{step, step_with_precision, successors, Branch, Config, Tape};

/// Failure while advancing a configuration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("configuration is already halted ({0:?})")]
    Halted(Halt),
    #[error("head moved to position {0}, off the tape")]
    HeadOutOfRange(i64),
    #[error("symbol {0:?} is not in the tape alphabet")]
    SymbolNotInAlphabet(char),
    #[error("state cannot be represented exactly: {0}")]
    Unrepresentable(String),
    #[error("no rule for state {state:?} on {symbol:?}")]
    NoRule { state: String, symbol: char },
}

impl QcfaMachine {
    /// The tape for `word`, rejecting symbols outside the input alphabet.
    pub fn tape(&self, word: &str) -> Result<Tape, StepError> {
        Tape::new(self, word)
    }
}

#[cfg(test)]
mod tests;
