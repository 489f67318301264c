use super::graph::{solve_region, ConfigGraph, Exit, NodeKind, RegionSolution};
use super::summary::{HaltingSummary, Mass, Strategy};
use super::{EngineError, EngineOptions};
use crate::automata::{successors, Config, Halt, QcfaMachine, Tape};
use crate::numerics::{CertifiedInterval, Prob, Rational};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::HashMap;

/// Per-round probabilities of a repeat-until-halt loop.
///
/// `p_accept` is the probability that a round advances (accepts, or hands
/// over to the next phase) *given* that it did not reject, which is how the
/// classic two-test round is usually described: first a test that rejects
/// with probability `p_reject`, then, if that passed, a test that advances
/// with probability `p_accept`. The absolute probabilities of the three
/// round outcomes are `p_reject`, `p_exit = p_accept·(1 − p_reject)` and
/// `p_continue = (1 − p_accept)(1 − p_reject)`; they sum to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundOutcome {
    pub p_accept: Prob,
    pub p_reject: Prob,
    pub p_exit: Prob,
    pub p_continue: Prob,
    /// Zero when step tracking is off.
    pub expected_steps: Prob,
    /// Whether `p_accept` was read off a single configuration that every
    /// non-rejecting path passes through (always exact when the rest of
    /// the round is), rather than obtained by division.
    pub via_frontier: bool,
}

impl RoundOutcome {
    pub fn new(p_accept: Prob, p_reject: Prob, expected_steps: Prob) -> RoundOutcome {
        let p_exit = p_accept.mul(&p_reject.one_minus());
        let p_continue = p_accept.one_minus().mul(&p_reject.one_minus());
        RoundOutcome { p_accept, p_reject, p_exit, p_continue, expected_steps, via_frontier: false }
    }

    fn from_region(sol: &RegionSolution) -> RoundOutcome {
        let mut out = RoundOutcome::new(sol.p_advance.clone(), sol.reject.clone(), sol.steps.clone());
        out.via_frontier = sol.frontier.is_some();
        out
    }
}

fn clamp01(q: Rational) -> Rational {
    if q < Rational::zero() {
        Rational::zero()
    } else if q > Rational::one() {
        Rational::one()
    } else {
        q
    }
}

/// `P_r / (P_a + P_r − P_a·P_r)`: the probability that the loop ever
/// rejects. The expression increases in `P_r` and decreases in `P_a`, so
/// interval inputs are handled by evaluating exactly at the endpoints.
pub fn closed_form_ratio(p_accept: &Prob, p_reject: &Prob) -> Result<Prob, EngineError> {
    let f = |a: &Rational, r: &Rational| -> Option<Rational> {
        let den = a + r - a * r;
        (!den.is_zero()).then(|| r / den)
    };
    if let (Some(a), Some(r)) = (p_accept.as_exact(), p_reject.as_exact()) {
        return f(a, r)
            .map(Prob::Exact)
            .ok_or_else(|| EngineError::NeverHalts("P_a + P_r = 0".into()));
    }
    let (a_lo, a_hi) = (clamp01(p_accept.lo()), clamp01(p_accept.hi()));
    let (r_lo, r_hi) = (clamp01(p_reject.lo()), clamp01(p_reject.hi()));
    if a_hi.is_zero() && r_hi.is_zero() {
        return Err(EngineError::NeverHalts("P_a + P_r = 0".into()));
    }
    let lo = f(&a_hi, &r_lo).unwrap_or_else(Rational::zero);
    let hi = f(&a_lo, &r_hi).unwrap_or_else(Rational::one);
    let prec = p_accept.precision().max(p_reject.precision());
    Ok(Prob::Interval(CertifiedInterval::between(&lo, &hi, prec)))
}

/// Total halting probabilities of the unbounded repetition of one round.
pub fn closed_form_total(outcome: &RoundOutcome) -> Result<HaltingSummary, EngineError> {
    let reject = closed_form_ratio(&outcome.p_accept, &outcome.p_reject)?;
    let halt = outcome.p_reject.add(&outcome.p_exit);
    let rounds = Prob::one().div(&halt).ok_or_else(|| EngineError::NeverHalts("P_a + P_r = 0".into()))?;
    Ok(HaltingSummary {
        strategy: Strategy::ClosedForm,
        accept: Mass::Certified(reject.one_minus().clamp_unit()),
        reject: Mass::Certified(reject),
        residual: Mass::Certified(Prob::zero()),
        expected_steps: Some(Mass::Certified(outcome.expected_steps.mul(&rounds))),
        expected_rounds: Some(Mass::Certified(rounds)),
        horizon: 0,
    })
}

/// One restart configuration met during an exact analysis.
#[derive(Clone, Debug, Serialize)]
pub struct MarkerReport {
    pub state: String,
    pub head: usize,
    pub round: RoundOutcome,
    /// Probability of eventually rejecting once this configuration is
    /// reached.
    pub reject_total: Prob,
    pub configurations: usize,
}

struct Totals {
    reject: Prob,
    steps: Prob,
    rounds: Prob,
}

struct Solver<'g, 'a> {
    graph: &'g mut ConfigGraph<'a>,
    solved: HashMap<usize, (RegionSolution, Totals)>,
    on_stack: Vec<usize>,
    order: Vec<usize>,
}

impl Solver<'_, '_> {
    fn solve(&mut self, x: usize) -> Result<(), EngineError> {
        if self.solved.contains_key(&x) {
            return Ok(());
        }
        if self.on_stack.contains(&x) {
            let c = self.graph.config(x);
            return Err(EngineError::CyclicRounds(format!(
                "{} at {}",
                self.graph.machine.state_name(c.classical),
                c.head
            )));
        }
        self.on_stack.push(x);
        let sol = solve_region(self.graph, x)?;
        for (e, _) in &sol.split {
            if let Exit::Marker(z) = e {
                self.solve(*z)?;
            }
        }
        self.on_stack.pop();

        let marker = sol.source_is_marker;
        let (r_x, den, exit_mass) = if marker {
            let r = closed_form_ratio(&sol.p_advance, &sol.reject)?;
            let den = sol.p_advance.add(&sol.reject).sub(&sol.p_advance.mul(&sol.reject));
            (r, den, sol.p_advance.mul(&sol.reject.one_minus()))
        } else {
            (sol.reject.clone(), Prob::one(), sol.reject.one_minus())
        };
        let mut later_reject = Prob::zero();
        let mut later_steps = Prob::zero();
        let mut later_rounds = Prob::zero();
        for (e, frac) in &sol.split {
            if let Exit::Marker(z) = e {
                let t = &self.solved[z].1;
                later_reject = later_reject.add(&frac.mul(&t.reject));
                let h = exit_mass.mul(frac);
                later_steps = later_steps.add(&h.mul(&t.steps));
                later_rounds = later_rounds.add(&h.mul(&t.rounds));
            }
        }
        let reject = r_x.add(&r_x.one_minus().mul(&later_reject)).clamp_unit();
        let never = || EngineError::NeverHalts(format!("round at node {x}"));
        let steps = sol.steps.add(&later_steps).div(&den).ok_or_else(never)?;
        let own = if marker { Prob::one() } else { Prob::zero() };
        let rounds = own.add(&later_rounds).div(&den).ok_or_else(never)?;
        self.order.push(x);
        self.solved.insert(x, (sol, Totals { reject, steps, rounds }));
        Ok(())
    }
}

/// Full result of an exact analysis.
#[derive(Clone, Debug, Serialize)]
pub struct ExactAnalysis {
    pub summary: HaltingSummary,
    pub markers: Vec<MarkerReport>,
    pub configurations: usize,
}

fn halted(h: Halt, steps: u64) -> ExactAnalysis {
    let (a, r) = match h {
        Halt::Accept => (Prob::one(), Prob::zero()),
        Halt::Reject => (Prob::zero(), Prob::one()),
    };
    ExactAnalysis {
        summary: HaltingSummary {
            strategy: Strategy::ClosedForm,
            accept: Mass::Certified(a),
            reject: Mass::Certified(r),
            residual: Mass::Certified(Prob::zero()),
            expected_steps: Some(Mass::Certified(Prob::exact(Rational::from_integer(steps.into())))),
            expected_rounds: Some(Mass::Certified(Prob::zero())),
            horizon: 0,
        },
        markers: Vec::new(),
        configurations: steps as usize + 1,
    }
}

/// Follows the run while every step is certain and no restart state has
/// been entered. Returns the halting verdict if the run ends that way.
fn deterministic_prefix(machine: &QcfaMachine, tape: &Tape, precision: u32) -> Result<Option<ExactAnalysis>, EngineError> {
    let cap = (machine.classical_count() * (tape.last() + 1)) as u64;
    let mut c = Config::initial(machine);
    for steps in 0..=cap {
        if let Some(h) = c.halting(machine) {
            return Ok(Some(halted(h, steps)));
        }
        if machine.is_round_start(c.classical) {
            return Ok(None);
        }
        let mut next = successors(&c, machine, tape, precision)?;
        if next.len() != 1 || !next[0].1.is_exact_one() {
            return Ok(None);
        }
        c = next.pop().expect("one successor").0;
    }
    Ok(None)
}

fn exact_analysis(machine: &QcfaMachine, word: &str, options: &EngineOptions) -> Result<ExactAnalysis, EngineError> {
    let tape = machine.tape(word)?;
    if let Some(a) = deterministic_prefix(machine, &tape, options.precision)? {
        return Ok(a);
    }
    let mut graph = ConfigGraph::new(machine, &tape, options.precision, options.node_cap);
    graph.track_steps = options.expected_steps;
    let root = graph.intern(Config::initial(machine))?;
    let mut solver = Solver { graph: &mut graph, solved: HashMap::new(), on_stack: Vec::new(), order: Vec::new() };
    solver.solve(root)?;
    let (_, totals) = &solver.solved[&root];
    let summary = HaltingSummary {
        strategy: Strategy::ClosedForm,
        accept: Mass::Certified(totals.reject.one_minus().clamp_unit()),
        reject: Mass::Certified(totals.reject.clone()),
        residual: Mass::Certified(Prob::zero()),
        expected_steps: options.expected_steps.then(|| Mass::Certified(totals.steps.clone())),
        expected_rounds: Some(Mass::Certified(totals.rounds.clone())),
        horizon: solver.order.iter().filter(|x| solver.solved[x].0.source_is_marker).count() as u64,
    };
    let mut markers = Vec::new();
    for x in solver.order.iter().rev() {
        let (sol, t) = &solver.solved[x];
        if !sol.source_is_marker {
            continue;
        }
        let c = solver.graph.config(*x);
        markers.push(MarkerReport {
            state: machine.state_name(c.classical).to_string(),
            head: c.head,
            round: RoundOutcome::from_region(sol),
            reject_total: t.reject.clone(),
            configurations: sol.nodes,
        });
    }
    let configurations = solver.graph.len();
    Ok(ExactAnalysis { summary, markers, configurations })
}

/// Exact halting probabilities: the run is cut into rounds at restart
/// configurations, each round is solved as an absorbing chain, and the
/// repetitions are summed in closed form. Phases (restart configurations
/// reachable from one another) must form an acyclic chain apart from each
/// round's return to its own start.
pub fn analyze_exact(machine: &QcfaMachine, word: &str, options: &EngineOptions) -> Result<HaltingSummary, EngineError> {
    Ok(exact_analysis(machine, word, options)?.summary)
}

/// Round outcome at the first restart configuration of the run (the
/// initial configuration if it is one).
pub fn round_analysis(machine: &QcfaMachine, word: &str, options: &EngineOptions) -> Result<RoundOutcome, EngineError> {
    let tape = machine.tape(word)?;
    let mut graph = ConfigGraph::new(machine, &tape, options.precision, options.node_cap);
    let mut x = graph.intern(Config::initial(machine))?;
    loop {
        match graph.kind(x) {
            NodeKind::Marker => break,
            NodeKind::Halt(_) => return Err(EngineError::NoRounds("run halts before any restart".into())),
            NodeKind::Inner => {
                let sol = solve_region(&mut graph, x)?;
                let markers: Vec<usize> = sol
                    .exits
                    .iter()
                    .filter_map(|(e, _)| if let Exit::Marker(z) = e { Some(*z) } else { None })
                    .collect();
                match markers.as_slice() {
                    [z] => x = *z,
                    [] => return Err(EngineError::NoRounds("no restart configuration reached".into())),
                    _ => return Err(EngineError::NoRounds("several first restart configurations".into())),
                }
            }
        }
    }
    Ok(RoundOutcome::from_region(&solve_region(&mut graph, x)?))
}

/// Round outcome for an explicitly designated restart configuration.
pub fn round_analysis_at(
    machine: &QcfaMachine,
    word: &str,
    marker: &Config,
    options: &EngineOptions,
) -> Result<RoundOutcome, EngineError> {
    let tape = machine.tape(word)?;
    let mut graph = ConfigGraph::new(machine, &tape, options.precision, options.node_cap);
    let x = graph.intern(marker.clone())?;
    if matches!(graph.kind(x), NodeKind::Halt(_)) {
        return Err(EngineError::NoRounds("designated configuration is halting".into()));
    }
    Ok(RoundOutcome::from_region(&solve_region(&mut graph, x)?))
}

/// Exact analyses of one machine, memoised by word. Words that the machine
/// cannot tell apart (same sequence of symbol classes) share an entry.
pub struct Analyzer<'m> {
    machine: &'m QcfaMachine,
    options: EngineOptions,
    classes: HashMap<char, char>,
    memo: HashMap<String, ExactAnalysis>,
}

impl<'m> Analyzer<'m> {
    pub fn new(machine: &'m QcfaMachine, options: EngineOptions) -> Self {
        Analyzer { machine, options, classes: machine.symbol_classes(), memo: HashMap::new() }
    }

    pub fn machine(&self) -> &QcfaMachine {
        self.machine
    }

    pub fn canonical(&self, word: &str) -> String {
        word.chars().map(|c| self.classes.get(&c).copied().unwrap_or(c)).collect()
    }

    pub fn analysis(&mut self, word: &str) -> Result<&ExactAnalysis, EngineError> {
        let key = self.canonical(word);
        if !self.memo.contains_key(&key) {
            let a = exact_analysis(self.machine, &key, &self.options)?;
            self.memo.insert(key.clone(), a);
        }
        Ok(&self.memo[&key])
    }

    pub fn analyze(&mut self, word: &str) -> Result<HaltingSummary, EngineError> {
        Ok(self.analysis(word)?.summary.clone())
    }

    pub fn cached(&self) -> usize {
        self.memo.len()
    }
}
