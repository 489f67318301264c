use super::graph::{ConfigGraph, NodeKind};
use super::summary::{HaltingSummary, Mass, SampledValue, Strategy};
use super::{EngineError, EngineOptions};
use crate::automata::{successors, Config, Halt, QcfaMachine, Tape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Beta, ContinuousCDF};

/// Two-sided 99% standard normal quantile.
pub const CONFIDENCE_Z: f64 = 2.5758293035489004;

/// Below this many successes (or failures) the normal approximation is
/// replaced by the exact binomial interval.
const NORMAL_FLOOR: u64 = 100;

/// Normal-approximation half-width of a 99% interval for `k` of `n`.
pub fn normal_half_width(k: u64, n: u64) -> f64 {
    let p = k as f64 / n as f64;
    CONFIDENCE_Z * (p * (1.0 - p) / n as f64).sqrt()
}

/// Exact (Clopper–Pearson) 99% interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64) -> (f64, f64) {
    let alpha = 0.01;
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(k as f64, (n - k + 1) as f64).expect("positive shape").inverse_cdf(alpha / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new((k + 1) as f64, (n - k) as f64).expect("positive shape").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

fn frequency(k: u64, n: u64) -> SampledValue {
    let p = k as f64 / n as f64;
    let (lo, hi) = if k.min(n - k) < NORMAL_FLOOR {
        clopper_pearson(k, n)
    } else {
        let h = normal_half_width(k, n);
        ((p - h).max(0.0), (p + h).min(1.0))
    };
    SampledValue { value: p, lo, hi, half_width: (p - lo).max(hi - p), samples: n }
}

fn mean(sum: f64, sum_sq: f64, k: u64) -> SampledValue {
    let m = sum / k as f64;
    let var = if k > 1 { ((sum_sq - sum * m) / (k - 1) as f64).max(0.0) } else { 0.0 };
    let h = CONFIDENCE_Z * (var / k as f64).sqrt();
    SampledValue { value: m, lo: m - h, hi: m + h, half_width: h, samples: k }
}

const LIVE: u8 = 0;
const ACCEPT: u8 = 1;
const REJECT: u8 = 2;
const TRAP: u8 = 3;

/// The reachable configuration graph flattened into arrays, with every
/// deterministic stretch collapsed into a single weighted jump.
struct Chain {
    kind: Vec<u8>,
    first: Vec<u32>,
    count: Vec<u32>,
    target: Vec<u32>,
    cum: Vec<f64>,
    steps: Vec<u64>,
    root: u32,
    root_steps: u64,
}

impl Chain {
    fn compile(g: &mut ConfigGraph<'_>, root: usize) -> Result<Chain, EngineError> {
        g.explore_all(root)?;
        let n = g.len();
        let mut kind = vec![LIVE; n];
        for v in 0..n {
            kind[v] = match g.kind(v) {
                NodeKind::Halt(Halt::Accept) => ACCEPT,
                NodeKind::Halt(Halt::Reject) => REJECT,
                _ => LIVE,
            };
        }
        let det = |g: &ConfigGraph<'_>, v: usize| -> Option<usize> {
            match g.expanded(v) {
                Some([(u, p)]) if p.is_exact_one() => Some(*u),
                _ => None,
            }
        };
        // resolve deterministic runs: v -> (first branching or halting node, steps)
        let mut resolved: Vec<Option<(usize, u64)>> = vec![None; n];
        for v in 0..n {
            if resolved[v].is_some() || kind[v] != LIVE {
                continue;
            }
            let mut path = vec![v];
            let mut cur = v;
            let end = loop {
                match det(g, cur) {
                    Some(u) if kind[u] == LIVE => {
                        if let Some((t, s)) = resolved[u] {
                            break Some((t, s + 1));
                        }
                        if path.len() > n {
                            break None;
                        }
                        path.push(u);
                        cur = u;
                    }
                    Some(u) => break Some((u, 1)),
                    None => break Some((cur, 0)),
                }
            };
            match end {
                Some((t, s)) => {
                    // `s` counts steps from the last node on `path`
                    let last = path.len() - 1;
                    for (i, &p) in path.iter().enumerate() {
                        resolved[p] = Some((t, s + (last - i) as u64));
                    }
                }
                None => {
                    for &p in &path {
                        kind[p] = TRAP;
                        resolved[p] = Some((p, 0));
                    }
                }
            }
        }
        let res = |v: usize| -> (usize, u64) {
            if kind[v] == LIVE {
                resolved[v].expect("resolved")
            } else {
                (v, 0)
            }
        };
        let mut first = vec![0u32; n];
        let mut count = vec![0u32; n];
        let mut target = Vec::new();
        let mut cum = Vec::new();
        let mut steps = Vec::new();
        for v in 0..n {
            if kind[v] != LIVE {
                continue;
            }
            let Some(out) = g.expanded(v) else { continue };
            if det(g, v).is_some() {
                continue;
            }
            first[v] = target.len() as u32;
            let total: f64 = out.iter().map(|(_, p)| p.to_f64()).sum();
            let mut acc = 0.0;
            for (u, p) in out {
                let (t, s) = res(*u);
                acc += p.to_f64() / total;
                target.push(t as u32);
                cum.push(acc);
                steps.push(s + 1);
            }
            if let Some(c) = cum.last_mut() {
                *c = 1.0;
            }
            count[v] = out.len() as u32;
        }
        let (r, rs) = res(root);
        Ok(Chain { kind, first, count, target, cum, steps, root: r as u32, root_steps: rs })
    }

    fn run(&self, rng: &mut ChaCha8Rng, cap: u64) -> (u8, u64) {
        let mut v = self.root as usize;
        let mut s = self.root_steps;
        loop {
            if s > cap {
                return (LIVE, s);
            }
            match self.kind[v] {
                LIVE => {}
                TRAP => return (LIVE, s),
                k => return (k, s),
            }
            let (f, c) = (self.first[v] as usize, self.count[v] as usize);
            let x: f64 = rng.gen();
            let mut i = f;
            while i + 1 < f + c && self.cum[i] <= x {
                i += 1;
            }
            s += self.steps[i];
            v = self.target[i] as usize;
        }
    }
}

fn run_direct(machine: &QcfaMachine, tape: &Tape, precision: u32, rng: &mut ChaCha8Rng, cap: u64) -> Result<(u8, u64), EngineError> {
    let mut c = Config::initial(machine);
    let mut s = 0;
    loop {
        match machine.halting(c.classical) {
            Some(Halt::Accept) => return Ok((ACCEPT, s)),
            Some(Halt::Reject) => return Ok((REJECT, s)),
            None if s >= cap => return Ok((LIVE, s)),
            None => {}
        }
        let next = successors(&c, machine, tape, precision)?;
        let total: f64 = next.iter().map(|(_, p)| p.to_f64()).sum();
        let x: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let last = next.len() - 1;
        let mut chosen = last;
        for (i, (_, p)) in next.iter().enumerate() {
            acc += p.to_f64();
            if x < acc {
                chosen = i;
                break;
            }
        }
        c = next.into_iter().nth(chosen).expect("nonempty").0;
        s += 1;
    }
}

/// Samples `trials` independent runs, each capped at `step_cap` steps
/// (capped runs count as residual). Trial `i` draws from the ChaCha8
/// stream `i` of `seed`, so results do not depend on evaluation order.
pub fn monte_carlo(
    machine: &QcfaMachine,
    word: &str,
    trials: u64,
    seed: u64,
    step_cap: u64,
    options: &EngineOptions,
) -> Result<HaltingSummary, EngineError> {
    if trials == 0 {
        return Err(EngineError::Argument("trials must be at least 1".into()));
    }
    let tape = machine.tape(word)?;
    let mut graph = ConfigGraph::new(machine, &tape, options.precision, options.node_cap);
    let root = graph.intern(Config::initial(machine))?;
    let chain = match Chain::compile(&mut graph, root) {
        Ok(c) => Some(c),
        Err(EngineError::NodeCap(_)) => None,
        Err(e) => return Err(e),
    };
    drop(graph);

    let (mut acc, mut rej, mut live) = (0u64, 0u64, 0u64);
    let (mut sum, mut sum_sq) = (0f64, 0f64);
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let (k, s) = match &chain {
            Some(ch) => ch.run(&mut rng, step_cap),
            None => run_direct(machine, &tape, options.precision, &mut rng, step_cap)?,
        };
        match k {
            ACCEPT => acc += 1,
            REJECT => rej += 1,
            _ => live += 1,
        }
        if k == ACCEPT || k == REJECT {
            sum += s as f64;
            sum_sq += (s as f64) * (s as f64);
        }
    }
    let halted = acc + rej;
    Ok(HaltingSummary {
        strategy: Strategy::MonteCarlo,
        accept: Mass::Sampled(frequency(acc, trials)),
        reject: Mass::Sampled(frequency(rej, trials)),
        residual: Mass::Sampled(frequency(live, trials)),
        expected_steps: (halted > 0).then(|| Mass::Sampled(mean(sum, sum_sq, halted))),
        expected_rounds: None,
        horizon: trials,
    })
}
