//! Evaluation strategies for a machine on a fixed input word.
//!
//! * [`analyze_exact`] cuts the run into rounds at the machine's restart
//!   configurations, solves each round as an absorbing Markov chain and sums
//!   the geometric series in closed form. This is the authoritative result.
//! * [`evolve_truncated`] unrolls the run for a fixed number of steps.
//! * [`monte_carlo`] samples independent trajectories.

mod graph;
mod monte_carlo;
mod rounds;
mod summary;
mod truncated;

pub use monte_carlo::{clopper_pearson, monte_carlo, normal_half_width, CONFIDENCE_Z};
pub use rounds::{
    analyze_exact, closed_form_ratio, closed_form_total, round_analysis, round_analysis_at, Analyzer,
    ExactAnalysis, MarkerReport, RoundOutcome,
};
pub use summary::{HaltingSummary, Mass, SampledValue, Strategy};
pub use truncated::{evolve_truncated, evolve_truncated_series};

use crate::automata::StepError;
use crate::numerics::DEFAULT_PRECISION;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("configuration space exceeds the cap of {0} nodes")]
    NodeCap(usize),
    #[error("branch count exceeds the cap of {0}")]
    BranchCap(usize),
    #[error("machine never halts from configuration {0}")]
    NeverHalts(String),
    #[error("round structure not detected: {0}")]
    NoRounds(String),
    #[error("restart configurations form a cycle through {0}")]
    CyclicRounds(String),
    #[error("interval arithmetic inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// Knobs shared by all strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    /// Working precision (bits) for certified intervals.
    pub precision: u32,
    /// Maximum number of distinct configurations explored.
    pub node_cap: usize,
    /// Maximum number of live branches in truncated evolution.
    pub branch_cap: usize,
    /// Compute expected step counts in exact analyses. Turning this off
    /// roughly halves the cost when only halting probabilities are needed.
    pub expected_steps: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { precision: DEFAULT_PRECISION, node_cap: 2_000_000, branch_cap: 1_000_000, expected_steps: true }
    }
}

#[cfg(test)]
mod tests;
