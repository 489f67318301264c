use super::BaselineError;
use crate::automata::{words_up_to, Dfa};
use crate::machines::{classify, Classification, Family};
use serde::Serialize;

/// An extension `z` with `u·z` a yes-instance and `v·z` a no-instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub yes: String,
    pub no: String,
    pub extension: String,
}

/// Pairwise-distinguishable prefixes, hence a lower bound on the number of
/// states of any DFA solving the problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub family: String,
    pub prefixes: Vec<String>,
    pub witnesses: Vec<Witness>,
    pub bound: usize,
}

impl Certificate {
    /// Human-readable proof listing every witness.
    pub fn render(&self) -> String {
        let mut s = format!(
            "{}: {} pairwise distinguishable prefixes, so any DFA has at least {} states\n",
            self.family,
            self.prefixes.len(),
            self.bound
        );
        for w in &self.witnesses {
            s.push_str(&format!(
                "  {:?}·{:?} is a yes-instance, {:?}·{:?} is a no-instance\n",
                w.yes, w.extension, w.no, w.extension
            ));
        }
        s
    }
}

fn separates(family: Family, u: &str, v: &str, z: &str) -> Option<Witness> {
    let cu = classify(family, &format!("{u}{z}")).ok()?;
    let cv = classify(family, &format!("{v}{z}")).ok()?;
    match (cu, cv) {
        (Classification::Yes, Classification::No) => {
            Some(Witness { yes: u.into(), no: v.into(), extension: z.into() })
        }
        (Classification::No, Classification::Yes) => {
            Some(Witness { yes: v.into(), no: u.into(), extension: z.into() })
        }
        _ => None,
    }
}

/// Finds a promise-respecting witness for every pair of `prefixes`,
/// trying the `hints` first and then every extension up to `max_ext`.
fn certify(
    family: Family,
    prefixes: Vec<String>,
    hints: &[String],
    max_ext: usize,
) -> Result<Certificate, BaselineError> {
    let mut pool: Vec<String> = hints.to_vec();
    pool.extend(words_up_to(family.alphabet(), max_ext));
    let mut witnesses = Vec::new();
    for i in 0..prefixes.len() {
        for j in i + 1..prefixes.len() {
            let (u, v) = (&prefixes[i], &prefixes[j]);
            let w = pool
                .iter()
                .find_map(|z| separates(family, u, v, z))
                .ok_or_else(|| BaselineError::NoWitness(u.clone(), v.clone()))?;
            witnesses.push(w);
        }
    }
    let bound = prefixes.len();
    Ok(Certificate { family: family.to_string(), prefixes, witnesses, bound })
}

/// Distinguishability certificate for `family`:
///
/// * `Aeq(m)`: the `2m+1` prefixes `a⁰…aᵐ, aᵐb¹…aᵐbᵐ` plus `aᵐbᵐ⁺¹`, whose
///   state cannot lead to acceptance; bound `2m+2`.
/// * `TwinM(m)`: all `x ∈ {a,b}ᵐ`, separated by `c·x`; bound `2ᵐ`.
pub fn nerode_distinguishability(family: Family, m: u64) -> Result<Certificate, BaselineError> {
    let m = m as usize;
    match family {
        Family::Aeq(fm) if fm as usize == m && m >= 1 => {
            let mut prefixes: Vec<String> = (0..=m).map(|i| "a".repeat(i)).collect();
            prefixes.extend((1..=m + 1).map(|j| format!("{}{}", "a".repeat(m), "b".repeat(j))));
            let target = format!("{}{}", "a".repeat(m), "b".repeat(m));
            let hints: Vec<String> =
                prefixes.iter().filter_map(|p| target.strip_prefix(p.as_str()).map(String::from)).collect();
            certify(family, prefixes, &hints, 2 * m)
        }
        Family::TwinM(fm) if fm as usize == m && m >= 1 => {
            let xs: Vec<String> = words_up_to(&['a', 'b'], m).into_iter().filter(|w| w.len() == m).collect();
            let hints: Vec<String> = xs.iter().map(|x| format!("c{x}")).collect();
            certify(family, xs, &hints, 0)
        }
        _ => Err(BaselineError::Parameter(format!("no certificate for {family} with m = {m}"))),
    }
}

/// Outcome of running the one-way protocol for equality derived from a
/// DFA for `{xcy : x = y, |x| = m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProtocolAudit {
    pub m: u64,
    pub pairs: u64,
    pub states: usize,
    /// `⌈log₂|S|⌉ + 1` bits.
    pub cost: u64,
    /// `D(EQ) = m + 1` forces `|S| ≥ 2ᵐ`.
    pub implied_bound: u64,
    pub satisfied: bool,
}

/// Alice runs the DFA on `x` and sends the state; Bob continues on `c·y`
/// and announces the verdict. Checks the answer is `x = y` for every pair.
pub fn eq_protocol_audit(dfa: &Dfa, m: u64) -> Result<ProtocolAudit, BaselineError> {
    let xs: Vec<String> = words_up_to(&['a', 'b'], m as usize).into_iter().filter(|w| w.len() == m as usize).collect();
    let mut pairs = 0;
    for x in &xs {
        let sent = dfa.run_from(dfa.start(), x)?;
        for y in xs.iter() {
            let end = dfa.run_from(sent, &format!("c{y}"))?;
            let got = dfa.is_accepting(end);
            if got != (x == y) {
                return Err(BaselineError::Protocol { x: x.clone(), y: y.clone(), got });
            }
            pairs += 1;
        }
    }
    let states = dfa.state_count();
    let cost = (usize::BITS - (states.max(1) - 1).leading_zeros()) as u64 + 1;
    let implied_bound = 1u64 << m;
    Ok(ProtocolAudit { m, pairs, states, cost, implied_bound, satisfied: states as u64 >= implied_bound })
}
