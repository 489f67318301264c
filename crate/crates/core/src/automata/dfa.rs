use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DfaError {
    #[error("symbol {0:?} is not in the DFA alphabet")]
    Symbol(char),
    #[error("transition function is not total: state {state:?} has no edge on {symbol:?}")]
    Partial { state: String, symbol: char },
    #[error("unknown state {0:?}")]
    UnknownState(String),
}

/// Serialized form: names instead of indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaSpec {
    pub name: String,
    pub states: Vec<String>,
    pub alphabet: Vec<char>,
    pub start: String,
    pub accepting: Vec<String>,
    pub transitions: Vec<(String, char, String)>,
}

/// A complete deterministic automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    name: String,
    states: Vec<String>,
    alphabet: Vec<char>,
    delta: Vec<Vec<usize>>,
    start: usize,
    accepting: Vec<bool>,
}

impl Dfa {
    /// Builds a DFA from a total transition table `delta[state][symbol]`.
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        alphabet: Vec<char>,
        delta: Vec<Vec<usize>>,
        start: usize,
        accepting: Vec<bool>,
    ) -> Result<Dfa, DfaError> {
        for (s, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() || row.iter().any(|&t| t >= states.len()) {
                let missing = alphabet.get(row.len()).copied().unwrap_or('?');
                return Err(DfaError::Partial { state: states[s].clone(), symbol: missing });
            }
        }
        assert_eq!(delta.len(), states.len());
        assert_eq!(accepting.len(), states.len());
        Ok(Dfa { name: name.into(), states, alphabet, delta, start, accepting })
    }

    pub fn from_spec(spec: &DfaSpec) -> Result<Dfa, DfaError> {
        let idx: HashMap<&str, usize> = spec.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let get = |n: &str| idx.get(n).copied().ok_or_else(|| DfaError::UnknownState(n.to_string()));
        let sym: HashMap<char, usize> = spec.alphabet.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut delta = vec![vec![usize::MAX; spec.alphabet.len()]; spec.states.len()];
        for (from, c, to) in &spec.transitions {
            let k = *sym.get(c).ok_or(DfaError::Symbol(*c))?;
            delta[get(from)?][k] = get(to)?;
        }
        for (s, row) in delta.iter().enumerate() {
            if let Some(k) = row.iter().position(|&t| t == usize::MAX) {
                return Err(DfaError::Partial { state: spec.states[s].clone(), symbol: spec.alphabet[k] });
            }
        }
        let mut accepting = vec![false; spec.states.len()];
        for a in &spec.accepting {
            accepting[get(a)?] = true;
        }
        Dfa::new(spec.name.clone(), spec.states.clone(), spec.alphabet.clone(), delta, get(&spec.start)?, accepting)
    }

    pub fn to_spec(&self) -> DfaSpec {
        let mut transitions = Vec::new();
        for (s, row) in self.delta.iter().enumerate() {
            for (k, &t) in row.iter().enumerate() {
                transitions.push((self.states[s].clone(), self.alphabet[k], self.states[t].clone()));
            }
        }
        DfaSpec {
            name: self.name.clone(),
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            start: self.states[self.start].clone(),
            accepting: self.states.iter().zip(&self.accepting).filter(|(_, &a)| a).map(|(s, _)| s.clone()).collect(),
            transitions,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    fn symbol(&self, c: char) -> Result<usize, DfaError> {
        self.alphabet.iter().position(|&a| a == c).ok_or(DfaError::Symbol(c))
    }

    pub fn next(&self, s: usize, c: char) -> Result<usize, DfaError> {
        Ok(self.delta[s][self.symbol(c)?])
    }

    /// Extended transition `δ̂(s, w)`.
    pub fn run_from(&self, s: usize, word: &str) -> Result<usize, DfaError> {
        word.chars().try_fold(s, |s, c| self.next(s, c))
    }

    pub fn run(&self, word: &str) -> Result<bool, DfaError> {
        Ok(self.accepting[self.run_from(self.start, word)?])
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(s) = queue.pop_front() {
            for &t in &self.delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Minimal equivalent DFA: unreachable states dropped, then Hopcroft
    /// partition refinement. Each class is named after its first member.
    pub fn minimize(&self) -> Dfa {
        let reach = self.reachable();
        let live: Vec<usize> = (0..self.states.len()).filter(|&s| reach[s]).collect();
        let nsym = self.alphabet.len();

        // inverse transitions restricted to reachable states
        let mut inverse: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); self.states.len()]; nsym];
        for &s in &live {
            for (k, &t) in self.delta[s].iter().enumerate() {
                inverse[k][t].push(s);
            }
        }

        let (acc, rej): (Vec<usize>, Vec<usize>) = live.iter().partition(|&&s| self.accepting[s]);
        let mut blocks: Vec<BTreeSet<usize>> = Vec::new();
        let mut block_of = vec![usize::MAX; self.states.len()];
        for part in [acc, rej] {
            if !part.is_empty() {
                for &s in &part {
                    block_of[s] = blocks.len();
                }
                blocks.push(part.into_iter().collect());
            }
        }
        let mut work: Vec<(usize, usize)> = Vec::new();
        if blocks.len() == 2 {
            let smaller = if blocks[0].len() <= blocks[1].len() { 0 } else { 1 };
            for k in 0..nsym {
                work.push((smaller, k));
            }
        }
        let mut in_work: std::collections::HashSet<(usize, usize)> = work.iter().copied().collect();

        while let Some((splitter, k)) = work.pop() {
            in_work.remove(&(splitter, k));
            let pre: BTreeSet<usize> =
                blocks[splitter].iter().flat_map(|&t| inverse[k][t].iter().copied()).collect();
            let touched: BTreeSet<usize> = pre.iter().map(|&s| block_of[s]).collect();
            for b in touched {
                let (inside, outside): (BTreeSet<usize>, BTreeSet<usize>) =
                    blocks[b].iter().partition(|s| pre.contains(s));
                if inside.is_empty() || outside.is_empty() {
                    continue;
                }
                let new = blocks.len();
                let (keep, moved) = if inside.len() <= outside.len() { (outside, inside) } else { (inside, outside) };
                for &s in &moved {
                    block_of[s] = new;
                }
                blocks[b] = keep;
                blocks.push(moved);
                // `moved` is the smaller half, so it suffices as a splitter
                // whether or not `b` is still pending
                for c in 0..nsym {
                    if in_work.insert((new, c)) {
                        work.push((new, c));
                    }
                }
            }
        }

        // renumber blocks by their smallest member for a canonical order
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&b| *blocks[b].iter().next().expect("blocks are nonempty"));
        let mut renum = vec![0; blocks.len()];
        for (i, &b) in order.iter().enumerate() {
            renum[b] = i;
        }
        let states: Vec<String> =
            order.iter().map(|&b| self.states[*blocks[b].iter().next().unwrap()].clone()).collect();
        let delta: Vec<Vec<usize>> = order
            .iter()
            .map(|&b| {
                let rep = *blocks[b].iter().next().unwrap();
                self.delta[rep].iter().map(|&t| renum[block_of[t]]).collect()
            })
            .collect();
        let accepting = order.iter().map(|&b| self.accepting[*blocks[b].iter().next().unwrap()]).collect();
        Dfa {
            name: format!("{}-min", self.name.trim_end_matches("-min")),
            states,
            alphabet: self.alphabet.clone(),
            delta,
            start: renum[block_of[self.start]],
            accepting,
        }
    }
}

/// Runs `dfa` on `word`.
pub fn run_dfa(dfa: &Dfa, word: &str) -> Result<bool, DfaError> {
    dfa.run(word)
}

/// The minimal DFA for the same language.
pub fn minimize_dfa(dfa: &Dfa) -> Dfa {
    dfa.minimize()
}

/// All words over `alphabet` of length at most `max_len`, shortest first.
pub fn words_up_to(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * alphabet.len());
        for w in &frontier {
            for &c in alphabet {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Words over {a,b} with an even number of a's, three states with one
    /// pair of equivalent states.
    fn parity() -> Dfa {
        Dfa::new(
            "parity",
            vec!["e".into(), "o".into(), "e2".into()],
            vec!['a', 'b'],
            vec![vec![1, 2], vec![2, 1], vec![1, 0]],
            0,
            vec![true, false, true],
        )
        .unwrap()
    }

    #[test]
    fn collapses_equivalent_states() {
        let m = parity().minimize();
        assert_eq!(m.state_count(), 2);
        for w in words_up_to(&['a', 'b'], 6) {
            assert_eq!(m.run(&w).unwrap(), parity().run(&w).unwrap());
        }
    }

    #[test]
    fn rejects_foreign_symbols() {
        assert_eq!(parity().run("ac"), Err(DfaError::Symbol('c')));
    }

    #[test]
    fn spec_round_trip() {
        let d = parity();
        let json = serde_json::to_string(&d.to_spec()).unwrap();
        let back = Dfa::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
