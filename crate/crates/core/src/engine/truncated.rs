use super::summary::{HaltingSummary, Mass, Strategy};
use super::{EngineError, EngineOptions};
use crate::automata::{successors, Amplitude, Config, Halt, QcfaMachine, Tape};
use crate::numerics::{Prob, Rational};
use std::collections::HashMap;

struct Evolution<'a> {
    machine: &'a QcfaMachine,
    tape: Tape,
    options: EngineOptions,
    live: HashMap<Config, Prob>,
    dense: Vec<(Config, Prob)>,
    cache: HashMap<Config, Vec<(Config, Prob)>>,
    accept: Prob,
    reject: Prob,
    weighted_steps: Prob,
    steps: u64,
}

impl<'a> Evolution<'a> {
    fn new(machine: &'a QcfaMachine, word: &str, options: EngineOptions) -> Result<Self, EngineError> {
        let tape = machine.tape(word)?;
        let mut ev = Evolution {
            machine,
            tape,
            options,
            live: HashMap::new(),
            dense: Vec::new(),
            cache: HashMap::new(),
            accept: Prob::zero(),
            reject: Prob::zero(),
            weighted_steps: Prob::zero(),
            steps: 0,
        };
        ev.deposit(Config::initial(machine), Prob::one());
        Ok(ev)
    }

    fn deposit(&mut self, c: Config, w: Prob) {
        match self.machine.halting(c.classical) {
            Some(h) => {
                self.weighted_steps = self.weighted_steps.add(&w.mul(&Prob::exact(Rational::from_integer(self.steps.into()))));
                match h {
                    Halt::Accept => self.accept = self.accept.add(&w),
                    Halt::Reject => self.reject = self.reject.add(&w),
                }
            }
            None if matches!(c.quantum, Amplitude::Dense { .. }) => self.dense.push((c, w)),
            None => {
                let e = self.live.entry(c).or_insert_with(Prob::zero);
                *e = e.add(&w);
            }
        }
    }

    fn advance(&mut self) -> Result<(), EngineError> {
        self.steps += 1;
        let live = std::mem::take(&mut self.live);
        let dense = std::mem::take(&mut self.dense);
        for (c, w) in live {
            if !self.cache.contains_key(&c) {
                let next = successors(&c, self.machine, &self.tape, self.options.precision)?;
                if self.cache.len() < self.options.node_cap {
                    self.cache.insert(c.clone(), next);
                } else {
                    for (n, p) in next {
                        self.deposit(n, w.mul(&p));
                    }
                    continue;
                }
            }
            let next = self.cache[&c].clone();
            for (n, p) in next {
                self.deposit(n, w.mul(&p));
            }
        }
        for (c, w) in dense {
            for (n, p) in successors(&c, self.machine, &self.tape, self.options.precision)? {
                self.deposit(n, w.mul(&p));
            }
        }
        let branches = self.live.len() + self.dense.len();
        if branches > self.options.branch_cap {
            return Err(EngineError::BranchCap(self.options.branch_cap));
        }
        Ok(())
    }

    fn summary(&self) -> HaltingSummary {
        let residual = self
            .live
            .values()
            .chain(self.dense.iter().map(|(_, w)| w))
            .fold(Prob::zero(), |acc, w| acc.add(w));
        let halted = self.accept.add(&self.reject);
        let expected = if halted.is_exact_zero() { None } else { self.weighted_steps.div(&halted) };
        HaltingSummary {
            strategy: Strategy::Truncated,
            accept: Mass::Certified(self.accept.clone()),
            reject: Mass::Certified(self.reject.clone()),
            residual: Mass::Certified(residual),
            expected_steps: expected.map(Mass::Certified),
            expected_rounds: None,
            horizon: self.steps,
        }
    }

    fn finished(&self) -> bool {
        self.live.is_empty() && self.dense.is_empty()
    }
}

/// Unrolls the run for `max_steps` steps, merging branches whose
/// configurations coincide exactly. Accept and reject masses are the
/// probabilities of halting within the horizon; the rest is residual.
pub fn evolve_truncated(
    machine: &QcfaMachine,
    word: &str,
    max_steps: u64,
    options: &EngineOptions,
) -> Result<HaltingSummary, EngineError> {
    let mut ev = Evolution::new(machine, word, *options)?;
    while ev.steps < max_steps && !ev.finished() {
        ev.advance()?;
    }
    let mut s = ev.summary();
    s.horizon = max_steps;
    Ok(s)
}

/// Summaries at each of the (sorted) `horizons`, from a single evolution.
pub fn evolve_truncated_series(
    machine: &QcfaMachine,
    word: &str,
    horizons: &[u64],
    options: &EngineOptions,
) -> Result<Vec<HaltingSummary>, EngineError> {
    let mut hs = horizons.to_vec();
    hs.sort_unstable();
    let mut ev = Evolution::new(machine, word, *options)?;
    let mut out = Vec::with_capacity(hs.len());
    for h in hs {
        while ev.steps < h && !ev.finished() {
            ev.advance()?;
        }
        let mut s = ev.summary();
        s.horizon = h;
        out.push(s);
    }
    Ok(out)
}
