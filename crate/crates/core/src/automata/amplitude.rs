use super::machine::{Backend, Op};
use super::StepError;
use crate::numerics::{rat, CertifiedInterval, FiveAdicVector, Prob, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Position of a block inside the machine's quantum index space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockInfo {
    pub backend: Backend,
    pub offset: usize,
    pub dim: usize,
}

impl BlockInfo {
    fn contains(&self, q: usize) -> bool {
        (self.offset..self.offset + self.dim).contains(&q)
    }
}

fn block_of(blocks: &[BlockInfo], q: usize) -> usize {
    blocks.iter().position(|b| b.contains(q)).expect("quantum index in range")
}

/// A pure quantum state. All amplitude is inside one block at a time.
///
/// * `Rotor`: `cos θ|0⟩ + sin θ|1⟩` with `θ = turns·√2·π + quarter·π/4`
///   taken mod `π` (a global sign is unobservable).
/// * `FiveAdic`: the exact vector, optionally with a Hadamard pending on the
///   first two coordinates (`hadamard = true` means the state is `H₀₁·v`).
/// * `Dense`: certified interval amplitudes; never merged by engines.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum Amplitude {
    Rotor { block: usize, turns: i64, quarter: u8 },
    FiveAdic { block: usize, vector: FiveAdicVector, hadamard: bool },
    Dense { block: usize, amps: Vec<CertifiedInterval> },
}

fn q4(j: i64) -> u8 {
    j.rem_euclid(4) as u8
}

/// Cached `sin²(turns·√2·π + quarter·π/4)`.
fn rotor_q1(turns: i64, quarter: u8, precision: u32) -> Prob {
    if turns == 0 {
        return Prob::Exact(match quarter % 4 {
            0 => Rational::zero(),
            2 => Rational::one(),
            _ => rat(1, 2),
        });
    }
    static CACHE: OnceLock<Mutex<HashMap<(i64, u8, u32), CertifiedInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (turns, quarter, precision);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Prob::Interval(v.clone());
    }
    let v = crate::numerics::rotor_q1_probability(turns, quarter, precision);
    cache.lock().unwrap().insert(key, v.clone());
    Prob::Interval(v)
}

impl Amplitude {
    /// The basis state with global index `q`.
    pub fn basis(blocks: &[BlockInfo], q: usize) -> Amplitude {
        let b = block_of(blocks, q);
        let info = blocks[b];
        let local = q - info.offset;
        match info.backend {
            Backend::Rotor => Amplitude::Rotor { block: b, turns: 0, quarter: if local == 0 { 0 } else { 2 } },
            Backend::FiveAdic => {
                Amplitude::FiveAdic { block: b, vector: FiveAdicVector::basis(3, local), hadamard: false }
            }
            Backend::Dense => {
                let prec = crate::numerics::DEFAULT_PRECISION;
                let amps = (0..info.dim)
                    .map(|i| if i == local { CertifiedInterval::one(prec) } else { CertifiedInterval::zero(prec) })
                    .collect();
                Amplitude::Dense { block: b, amps }
            }
        }
    }

    pub fn block(&self) -> usize {
        match self {
            Amplitude::Rotor { block, .. } | Amplitude::FiveAdic { block, .. } | Amplitude::Dense { block, .. } => *block,
        }
    }

    /// Exact backends can be compared and merged soundly.
    pub fn is_exact(&self) -> bool {
        !matches!(self, Amplitude::Dense { .. })
    }

    /// If the state is (up to sign) a basis vector, its global index.
    pub fn basis_index(&self, blocks: &[BlockInfo]) -> Option<usize> {
        let off = blocks[self.block()].offset;
        match self {
            Amplitude::Rotor { turns: 0, quarter, .. } => match quarter % 4 {
                0 => Some(off),
                2 => Some(off + 1),
                _ => None,
            },
            Amplitude::Rotor { .. } => None,
            Amplitude::FiveAdic { vector, hadamard, .. } => match vector.basis_index() {
                Some(i) if !hadamard || i == 2 => Some(off + i),
                _ => None,
            },
            Amplitude::Dense { .. } => None,
        }
    }

    /// Exact squared magnitude of each local component, where available.
    fn exact_local_probabilities(&self) -> Option<Vec<Rational>> {
        match self {
            Amplitude::Rotor { turns: 0, quarter, .. } => {
                let p1 = match quarter % 4 {
                    0 => Rational::zero(),
                    2 => Rational::one(),
                    _ => rat(1, 2),
                };
                Some(vec![Rational::one() - &p1, p1])
            }
            Amplitude::Rotor { .. } | Amplitude::Dense { .. } => None,
            Amplitude::FiveAdic { vector, hadamard, .. } => {
                let e = vector.entries();
                let den: BigInt = BigInt::from(25).pow(vector.scale());
                if *hadamard {
                    let s = &e[0] + &e[1];
                    let d = &e[0] - &e[1];
                    let two_den: BigInt = &den * 2;
                    Some(vec![
                        Rational::new(&s * &s, two_den.clone()),
                        Rational::new(&d * &d, two_den),
                        Rational::new(&e[2] * &e[2], den),
                    ])
                } else {
                    Some(e.iter().map(|x| Rational::new(x * x, den.clone())).collect())
                }
            }
        }
    }

    /// Squared magnitudes of the local components as [`Prob`] values.
    pub fn local_probabilities(&self, precision: u32) -> Vec<Prob> {
        if let Some(v) = self.exact_local_probabilities() {
            return v.into_iter().map(Prob::Exact).collect();
        }
        match self {
            Amplitude::Rotor { turns, quarter, .. } => {
                let p1 = rotor_q1(*turns, *quarter, precision);
                vec![p1.one_minus().clamp_unit(), p1]
            }
            Amplitude::Dense { amps, .. } => amps.iter().map(|a| Prob::Interval(a.square().clamp_unit())).collect(),
            Amplitude::FiveAdic { .. } => unreachable!("five-adic probabilities are exact"),
        }
    }

    /// Applies a validated operator. Operators on other blocks act as the
    /// identity (direct sum), except `Swap`, which can move a basis state
    /// across blocks.
    pub fn apply(&self, op: &Op, blocks: &[BlockInfo]) -> Result<Amplitude, StepError> {
        let mine = self.block();
        match op {
            Op::Identity => Ok(self.clone()),
            Op::Rotate { block, turns } if *block == mine => match self {
                Amplitude::Rotor { block, turns: t, quarter } => {
                    Ok(Amplitude::Rotor { block: *block, turns: t + turns, quarter: *quarter })
                }
                Amplitude::Dense { block, amps } => {
                    let prec = amps[0].precision();
                    let (s, c) = crate::numerics::sin_cos_turns(*turns, prec);
                    let mut out = amps.clone();
                    out[0] = c.mul(&amps[0]).sub(&s.mul(&amps[1]));
                    out[1] = s.mul(&amps[0]).add(&c.mul(&amps[1]));
                    Ok(Amplitude::Dense { block: *block, amps: out })
                }
                Amplitude::FiveAdic { .. } => Err(StepError::Unrepresentable("rotation on a five-adic block".into())),
            },
            Op::Hadamard { block } if *block == mine => match self {
                Amplitude::Rotor { block, turns, quarter } => {
                    Ok(Amplitude::Rotor { block: *block, turns: -turns, quarter: q4(1 - *quarter as i64) })
                }
                Amplitude::FiveAdic { block, vector, hadamard } => {
                    Ok(Amplitude::FiveAdic { block: *block, vector: vector.clone(), hadamard: !hadamard })
                }
                Amplitude::Dense { block, amps } => {
                    let prec = amps[0].precision();
                    let r = CertifiedInterval::from_int(2, prec).sqrt();
                    let mut out = amps.clone();
                    out[0] = amps[0].add(&amps[1]).div(&r).expect("√2 is positive");
                    out[1] = amps[0].sub(&amps[1]).div(&r).expect("√2 is positive");
                    Ok(Amplitude::Dense { block: *block, amps: out })
                }
            },
            Op::Generator { block, g } if *block == mine => match self {
                Amplitude::FiveAdic { block, vector, hadamard: false } => Ok(Amplitude::FiveAdic {
                    block: *block,
                    vector: vector.apply(*g).map_err(|e| StepError::Unrepresentable(e.to_string()))?,
                    hadamard: false,
                }),
                _ => Err(StepError::Unrepresentable("generator applied to a state with a pending Hadamard".into())),
            },
            Op::SignedPermutation { block, swap, reflect } if *block == mine => match self {
                Amplitude::Rotor { block, turns, quarter } => {
                    let j = *quarter as i64;
                    let (t, j) = match (swap, reflect) {
                        (false, false) => (*turns, j),
                        (false, true) => (-turns, -j),
                        (true, true) => (-turns, 2 - j),
                        (true, false) => (*turns, j + 2),
                    };
                    Ok(Amplitude::Rotor { block: *block, turns: t, quarter: q4(j) })
                }
                _ => Err(StepError::Unrepresentable("signed permutation outside a rotor block".into())),
            },
            Op::Matrix { block, rows, scale } if *block == mine => match self {
                Amplitude::Dense { block, amps } => {
                    let prec = amps[0].precision();
                    let out = rows
                        .iter()
                        .map(|row| {
                            row.iter()
                                .zip(amps)
                                .fold(CertifiedInterval::zero(prec), |acc, (m, a)| {
                                    acc.add(&a.mul(&CertifiedInterval::from_int(*m, prec)))
                                })
                                .div_int(*scale as u64)
                        })
                        .collect();
                    Ok(Amplitude::Dense { block: *block, amps: out })
                }
                _ => Err(StepError::Unrepresentable("dense matrix on an exact block".into())),
            },
            Op::Swap(a, b) => self.swap(*a, *b, blocks),
            _ => Ok(self.clone()),
        }
    }

    fn swap(&self, a: usize, b: usize, blocks: &[BlockInfo]) -> Result<Amplitude, StepError> {
        let mine = self.block();
        let info = blocks[mine];
        let (ina, inb) = (info.contains(a), info.contains(b));
        if !ina && !inb {
            return Ok(self.clone());
        }
        if ina && inb {
            let (i, j) = {
                let (x, y) = (a - info.offset, b - info.offset);
                (x.min(y), x.max(y))
            };
            if i == j {
                return Ok(self.clone());
            }
            return match self {
                Amplitude::Rotor { block, turns, quarter } => {
                    Ok(Amplitude::Rotor { block: *block, turns: -turns, quarter: q4(2 - *quarter as i64) })
                }
                Amplitude::FiveAdic { block, vector, hadamard: false } => {
                    Ok(Amplitude::FiveAdic { block: *block, vector: vector.swapped(i, j), hadamard: false })
                }
                Amplitude::FiveAdic { block, vector, hadamard: true } if (i, j) == (0, 1) => {
                    // X·H = H·Z
                    let mut e = vector.entries().to_vec();
                    e[1] = -&e[1];
                    Ok(Amplitude::FiveAdic {
                        block: *block,
                        vector: FiveAdicVector::new(e, vector.scale()),
                        hadamard: true,
                    })
                }
                Amplitude::FiveAdic { .. } => {
                    Err(StepError::Unrepresentable("swap with a pending Hadamard".into()))
                }
                Amplitude::Dense { block, amps } => {
                    let mut out = amps.clone();
                    out.swap(i, j);
                    Ok(Amplitude::Dense { block: *block, amps: out })
                }
            };
        }
        // one index here, the other in another block
        let (inside, outside) = if ina { (a, b) } else { (b, a) };
        match self.basis_index(blocks) {
            Some(g) if g == inside => Ok(Amplitude::basis(blocks, outside)),
            Some(_) => Ok(self.clone()),
            None => {
                let local = inside - info.offset;
                let zero = self.exact_local_probabilities().map(|p| p[local].is_zero()).unwrap_or(false);
                if zero {
                    Ok(self.clone())
                } else {
                    Err(StepError::Unrepresentable("swap would split the state across blocks".into()))
                }
            }
        }
    }

    /// Projective measurement with the given outcomes (global basis index
    /// sets, a partition of all states). Returns `(outcome, probability,
    /// post-measurement state)` for every outcome of nonzero probability.
    pub fn measure(
        &self,
        outcomes: &[&[usize]],
        blocks: &[BlockInfo],
        precision: u32,
    ) -> Result<Vec<(usize, Prob, Amplitude)>, StepError> {
        let info = blocks[self.block()];
        let probs = self.local_probabilities(precision);
        let mut out = Vec::new();
        for (k, set) in outcomes.iter().enumerate() {
            let locals: Vec<usize> =
                set.iter().filter(|&&q| info.contains(q)).map(|&q| q - info.offset).collect();
            if locals.is_empty() {
                continue;
            }
            let p = locals.iter().fold(Prob::zero(), |acc, &i| acc.add(&probs[i])).clamp_unit();
            if p.is_exact_zero() {
                continue;
            }
            let nonzero: Vec<usize> = (0..info.dim).filter(|&i| !probs[i].is_exact_zero()).collect();
            let covers_all = nonzero.iter().all(|i| locals.contains(i));
            if covers_all {
                out.push((k, Prob::one(), self.clone()));
                continue;
            }
            let hit: Vec<usize> = locals.iter().copied().filter(|i| nonzero.contains(i)).collect();
            let post = match self {
                Amplitude::Dense { block, amps } => {
                    let pi = p.to_interval(precision);
                    if !pi.certainly_positive() {
                        return Err(StepError::Unrepresentable(
                            "outcome probability not separated from zero".into(),
                        ));
                    }
                    let norm = pi.sqrt();
                    let amps = amps
                        .iter()
                        .enumerate()
                        .map(|(i, a)| {
                            if locals.contains(&i) {
                                a.div(&norm).expect("norm is positive")
                            } else {
                                CertifiedInterval::zero(a.precision())
                            }
                        })
                        .collect();
                    Amplitude::Dense { block: *block, amps }
                }
                _ if hit.len() == 1 => Amplitude::basis(blocks, info.offset + hit[0]),
                _ => {
                    return Err(StepError::Unrepresentable(
                        "projection onto a multi-state subspace is not exact in this backend".into(),
                    ))
                }
            };
            out.push((k, p, post));
        }
        Ok(out)
    }

    /// Short human-readable rendering.
    pub fn describe(&self) -> String {
        match self {
            Amplitude::Rotor { block, turns, quarter } => format!("rotor[{block}](t={turns}, j={quarter})"),
            Amplitude::FiveAdic { block, vector, hadamard } => {
                format!("five-adic[{block}]{}{:?}", if *hadamard { "H·" } else { "" }, vector)
            }
            Amplitude::Dense { block, amps } => {
                let v: Vec<String> = amps.iter().map(|a| format!("{:.6}", a.mid_f64())).collect();
                format!("dense[{block}]({})", v.join(", "))
            }
        }
    }
}
