//! Classical counterparts: explicit DFAs, distinguishability certificates,
//! the random-walk absorption solve and the two-way lower-bound calculator.

mod bounds;
mod nerode;

pub use bounds::{lower_bound, lower_bound_table, min_states, paper_floor, BoundRow, Model};
pub use nerode::{eq_protocol_audit, nerode_distinguishability, Certificate, ProtocolAudit, Witness};

use crate::automata::{Dfa, DfaError};
use crate::numerics::{rat, Rational};
use num_traits::{One, Zero};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BaselineError {
    #[error("bad parameter: {0}")]
    Parameter(String),
    #[error("no distinguishing extension for {0:?} and {1:?}")]
    NoWitness(String, String),
    #[error("protocol computed EQ({x}, {y}) = {got}")]
    Protocol { x: String, y: String, got: bool },
    #[error(transparent)]
    Dfa(#[from] DfaError),
}

/// Largest `m` accepted by [`build_twin_dfa`].
pub const TWIN_DFA_MAX_M: u64 = 5;

/// The `(2m+2)`-state DFA solving the promise `aᵐbᵐ` versus other words
/// of length at least `m`: a chain `p₀ –a→ … –a→ pₘ –b→ q₁ –b→ … –b→ qₘ`
/// with every other edge into the sink `r`.
pub fn build_figure_dfa(m: u64) -> Result<Dfa, BaselineError> {
    if m == 0 {
        return Err(BaselineError::Parameter("m must be at least 1".into()));
    }
    let m = m as usize;
    let mut states: Vec<String> = (0..=m).map(|i| format!("p{i}")).collect();
    states.extend((1..=m).map(|i| format!("q{i}")));
    states.push("r".into());
    let p = |i: usize| i;
    let q = |i: usize| m + i;
    let r = 2 * m + 1;
    let mut delta = vec![vec![r, r]; 2 * m + 2];
    for i in 0..m {
        delta[p(i)][0] = p(i + 1);
    }
    delta[p(m)][1] = q(1);
    for i in 1..m {
        delta[q(i)][1] = q(i + 1);
    }
    let mut accepting = vec![false; 2 * m + 2];
    accepting[q(m)] = true;
    Ok(Dfa::new(format!("figure-dfa(m={m})"), states, vec!['a', 'b'], delta, p(0), accepting)?)
}

/// DFA for `{xcx : x ∈ {a,b}ᵐ}`: a trie of prefixes `x`, then a chain of
/// remaining suffixes to match after `c`, plus a sink.
pub fn build_twin_dfa(m: u64) -> Result<Dfa, BaselineError> {
    if m == 0 || m > TWIN_DFA_MAX_M {
        return Err(BaselineError::Parameter(format!("m must be in 1..={TWIN_DFA_MAX_M}")));
    }
    let m = m as usize;
    let words = crate::automata::words_up_to(&['a', 'b'], m);
    let mut states = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for w in &words {
        index.insert(format!("p:{w}"), states.len());
        states.push(format!("p:{w}"));
    }
    for w in &words {
        index.insert(format!("s:{w}"), states.len());
        states.push(format!("s:{w}"));
    }
    let sink = states.len();
    states.push("r".into());
    let alphabet = vec!['a', 'b', 'c'];
    let mut delta = vec![vec![sink; 3]; states.len()];
    for w in &words {
        let from = index[&format!("p:{w}")];
        if w.len() < m {
            delta[from][0] = index[&format!("p:{w}a")];
            delta[from][1] = index[&format!("p:{w}b")];
        } else {
            delta[from][2] = index[&format!("s:{w}")];
        }
        if let Some(first) = w.chars().next() {
            let from = index[&format!("s:{w}")];
            delta[from][if first == 'a' { 0 } else { 1 }] = index[&format!("s:{}", &w[1..])];
        }
    }
    let mut accepting = vec![false; states.len()];
    accepting[index["s:"]] = true;
    Ok(Dfa::new(format!("twin-dfa(m={m})"), states, alphabet, delta, index["p:"], accepting)?)
}

/// Probability that the symmetric ±1 walk started at 1 reaches `n+1`
/// before `0`, by an exact tridiagonal (Thomas) solve of
/// `xᵢ = ½xᵢ₋₁ + ½xᵢ₊₁`, `x₀ = 0`, `xₙ₊₁ = 1`.
pub fn random_walk_absorption(n: u64) -> Result<Rational, BaselineError> {
    if n == 0 {
        return Err(BaselineError::Parameter("n must be at least 1".into()));
    }
    // rows: -½ xᵢ₋₁ + xᵢ - ½ xᵢ₊₁ = rhsᵢ
    let half = rat(1, 2);
    let n = n as usize;
    let mut c = vec![Rational::zero(); n];
    let mut d = vec![Rational::zero(); n];
    for i in 0..n {
        let rhs = if i == n - 1 { half.clone() } else { Rational::zero() };
        let (denom, carry) = if i == 0 {
            (Rational::one(), Rational::zero())
        } else {
            (Rational::one() - &half * &c[i - 1], &half * &d[i - 1])
        };
        c[i] = if i == n - 1 { Rational::zero() } else { &half / &denom };
        d[i] = (rhs + carry) / denom;
    }
    let mut x = d[n - 1].clone();
    for i in (0..n - 1).rev() {
        x = &d[i] + &c[i] * x;
    }
    Ok(x)
}

#[cfg(test)]
mod tests;
