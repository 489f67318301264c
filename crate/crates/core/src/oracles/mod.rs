//! Exhaustive and certified checks of the number-theoretic and
//! trigonometric facts behind the machines' soundness.

use crate::numerics::{
    certify_with_escalation, rational_to_f64, rational_to_string, rotation_reject_probability, Generator, Rational,
    DEFAULT_PRECISION,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{HashMap, HashSet};

/// Integer vector `(u[1], u[2], u[3])`.
pub type Vec3 = [BigInt; 3];

/// Longest word accepted by the exhaustive checks.
pub const WORD_CAP: usize = 12;
/// Largest `n + m` accepted by [`xy_gap`].
pub const XY_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("word contains {0:?}; expected A or B")]
    Symbol(char),
    #[error("certification inconclusive: {0}")]
    Inconclusive(String),
}

/// Result of one lemma check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub lemma: String,
    pub cap: u64,
    pub instances_checked: u64,
    pub counterexamples: Vec<String>,
    /// Smallest slack observed, where the lemma has one.
    pub min_margin: Option<String>,
    /// Extra counts, reported alongside the verdict.
    pub notes: Vec<(String, u64)>,
}

impl OracleReport {
    fn new(lemma: &str, cap: u64) -> Self {
        OracleReport {
            lemma: lemma.into(),
            cap,
            instances_checked: 0,
            counterexamples: Vec::new(),
            min_margin: None,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

pub fn vec3(a: i64, b: i64, c: i64) -> Vec3 {
    [a.into(), b.into(), c.into()]
}

fn e1() -> Vec3 {
    vec3(1, 0, 0)
}

fn show(u: &Vec3) -> String {
    format!("({}, {}, {})", u[0], u[1], u[2])
}

/// `f(u) = 4u[1] + 3u[2] + 3u[3]`.
pub fn f_value(u: &Vec3) -> BigInt {
    &u[0] * 4 + &u[1] * 3 + &u[2] * 3
}

fn divisible_by_5(x: &BigInt) -> bool {
    x.is_multiple_of(&BigInt::from(5))
}

/// `u[1] ≢ 0`, `f(u) ≢ 0` and `u[2]·u[3] ≡ 0 (mod 5)`.
pub fn in_k(u: &Vec3) -> bool {
    !divisible_by_5(&u[0]) && !divisible_by_5(&f_value(u)) && divisible_by_5(&(&u[1] * &u[2]))
}

fn generator(c: char) -> Result<Generator, OracleError> {
    match c {
        'A' | 'a' => Ok(Generator::A),
        'B' | 'b' => Ok(Generator::B),
        _ => Err(OracleError::Symbol(c)),
    }
}

/// All words over `{A, B}` of length exactly `len`, with the image of
/// `(1,0,0)` under `X_len ⋯ X_1` (first letter applied first).
fn images(len: usize, inverse: bool) -> Vec<(String, Vec3)> {
    let mut layer = vec![(String::new(), e1())];
    for _ in 0..len {
        let mut next = Vec::with_capacity(layer.len() * 2);
        for (w, u) in &layer {
            for c in ['A', 'B'] {
                let g = generator(c).expect("fixed letters");
                let g = if inverse { g.inverse() } else { g };
                next.push((format!("{w}{c}"), g.mul_int(u)));
            }
        }
        layer = next;
    }
    layer
}

fn check_cap(name: &str, len: usize, cap: usize) -> Result<(), OracleError> {
    if len > cap {
        return Err(OracleError::Cap(format!("{name} = {len} exceeds {cap}")));
    }
    Ok(())
}

/// For every vector `u ∈ K` reachable from `(1,0,0)` by a word shorter
/// than `max_len`, checks `Au ∈ K` and `Bu ∈ K`.
pub fn verify_k_closure(max_len: usize) -> Result<OracleReport, OracleError> {
    check_cap("max_len", max_len, WORD_CAP)?;
    let mut r = OracleReport::new("K is closed under A and B", max_len as u64);
    let mut outside = 0;
    for len in 0..max_len {
        for (w, u) in images(len, false) {
            if !in_k(&u) {
                outside += 1;
                r.counterexamples.push(format!("{w}: reachable {} is not in K", show(&u)));
                continue;
            }
            for g in [Generator::A, Generator::B] {
                let v = g.mul_int(&u);
                r.instances_checked += 1;
                if !in_k(&v) {
                    r.counterexamples.push(format!("{g:?}·{} = {} is not in K", show(&u), show(&v)));
                }
            }
        }
    }
    r.notes.push(("reachable vectors outside K".into(), outside));
    Ok(r)
}

fn solve_exact(g: Generator, u: &Vec3) -> Option<Vec3> {
    // g⁻¹ = gᵀ / 25
    let t = g.inverse().mul_int(u);
    let q = BigInt::from(25);
    t.iter().all(|x| x.is_multiple_of(&q)).then(|| std::array::from_fn(|i| &t[i] / &q))
}

/// Checks that no vector of the form `Av = Bw` (integer `v`, `w`) lies in
/// `K`: exhaustively over `v, w` reachable within `max_len`, and on
/// `samples` random vectors with entries in `[−5⁴, 5⁴]`.
pub fn verify_no_collision(max_len: usize, samples: u64, seed: u64) -> Result<OracleReport, OracleError> {
    check_cap("max_len", max_len, WORD_CAP)?;
    let mut r = OracleReport::new("Av = Bw implies the vector is outside K", max_len as u64);
    let reachable: Vec<(String, Vec3)> = (0..=max_len).flat_map(|l| images(l, false)).collect();
    let mut by_a: HashMap<Vec3, String> = HashMap::new();
    for (w, v) in &reachable {
        by_a.entry(Generator::A.mul_int(v)).or_insert_with(|| w.clone());
    }
    let mut seen: HashSet<Vec3> = HashSet::new();
    let mut collisions = 0;
    for (w, v) in &reachable {
        let u = Generator::B.mul_int(v);
        if let Some(x) = by_a.get(&u) {
            if seen.insert(u.clone()) {
                collisions += 1;
                r.instances_checked += 1;
                if in_k(&u) {
                    r.counterexamples.push(format!("A·[{x}] = B·[{w}] = {} lies in K", show(&u)));
                }
            }
        }
    }
    r.notes.push(("reachable collisions".into(), collisions));

    let bound = 625i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut premise = 0;
    for _ in 0..samples {
        let u = vec3(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        r.instances_checked += 1;
        if let (Some(v), Some(w)) = (solve_exact(Generator::A, &u), solve_exact(Generator::B, &u)) {
            premise += 1;
            if in_k(&u) {
                r.counterexamples.push(format!("{} = A{} = B{} lies in K", show(&u), show(&v), show(&w)));
            }
        }
    }
    r.notes.push(("random vectors".into(), samples));
    r.notes.push(("random vectors of the form Av = Bw".into(), premise));
    Ok(r)
}

/// `Some(j)` if `u = ±5ʲ·(1,0,0)`.
fn basis_power(u: &Vec3) -> Option<u32> {
    if !u[1].is_zero() || !u[2].is_zero() || u[0].is_zero() {
        return None;
    }
    let mut x = u[0].abs();
    let mut j = 0;
    let five = BigInt::from(5);
    while x.is_multiple_of(&five) {
        x /= &five;
        j += 1;
    }
    x.is_one().then_some(j)
}

/// For every nonempty word of length `≤ max_len`: the forward image
/// `X_k⋯X_1(1,0,0)` is not `±5ˡ(1,0,0)` for `l ≥ 1`, and the inverse image
/// `Y_1⁻¹⋯Y_k⁻¹(1,0,0)` is not `±5⁻ˡ(1,0,0)` for `l ≥ 1`. The case `l = 0`
/// (the image is `±(1,0,0)` itself) is counted separately.
pub fn verify_basis_avoidance(max_len: usize) -> Result<OracleReport, OracleError> {
    check_cap("max_len", max_len, WORD_CAP)?;
    let mut r = OracleReport::new("words never map (1,0,0) onto a multiple of itself", max_len as u64);
    let (mut fwd0, mut inv0) = (0, 0);
    for len in 1..=max_len {
        for (w, u) in images(len, false) {
            r.instances_checked += 1;
            match basis_power(&u) {
                Some(0) => fwd0 += 1,
                Some(l) => r.counterexamples.push(format!("{w} maps (1,0,0) to ±5^{l}(1,0,0)")),
                None => {}
            }
        }
        // inverse form: Y_1⁻¹⋯Y_k⁻¹ = Y_1ᵀ⋯Y_kᵀ / 25ᵏ, applied right to left
        for (w, t) in images(len, true) {
            r.instances_checked += 1;
            let w: String = w.chars().rev().collect();
            if let Some(j) = basis_power(&t) {
                let two_k = 2 * len as i64;
                match two_k - j as i64 {
                    0 => inv0 += 1,
                    l if l > 0 => r.counterexamples.push(format!("inverse of {w} maps (1,0,0) to ±5^-{l}(1,0,0)")),
                    l => r.counterexamples.push(format!("inverse of {w} maps (1,0,0) to ±5^{}(1,0,0)", -l)),
                }
            }
        }
    }
    r.notes.push(("forward images equal to ±(1,0,0)".into(), fwd0));
    r.notes.push(("inverse images equal to ±(1,0,0)".into(), inv0));
    Ok(r)
}

/// `u[2]² + u[3]²` for
/// `u = (5Y₁⁻¹)⋯(5Yₘ⁻¹)(5⁻¹Xₙ)⋯(5⁻¹X₁)(1,0,0)`, where `x = X₁⋯Xₙ` and
/// `y = Y₁⋯Yₘ` are words over `{A, B}`.
pub fn xy_gap(x: &str, y: &str) -> Result<Rational, OracleError> {
    let (n, m) = (x.chars().count(), y.chars().count());
    check_cap("n + m", n + m, XY_CAP)?;
    let mut u = e1();
    for c in x.chars() {
        u = generator(c)?.mul_int(&u);
    }
    // 5Y⁻¹ = Yᵀ/5, so Y_m is applied first
    for c in y.chars().rev() {
        u = generator(c)?.inverse().mul_int(&u);
    }
    let num = &u[1] * &u[1] + &u[2] * &u[2];
    let den = num_traits::pow(BigInt::from(5), 2 * (n + m));
    Ok(Rational::new(num, den))
}

/// For every pair of words with `n + m ≤ max_total`: the gap is zero
/// exactly when the words are equal, and exceeds `5^{−(n+m)}` otherwise.
/// Also checks the gap is symmetric in the two words.
pub fn verify_xy_gap(max_total: usize) -> Result<OracleReport, OracleError> {
    check_cap("n + m", max_total, XY_CAP)?;
    let mut r = OracleReport::new("xy gap separates distinct words", max_total as u64);
    let words: Vec<String> = (0..=max_total).flat_map(|l| images(l, false).into_iter().map(|(w, _)| w)).collect();
    let mut min_margin: Option<Rational> = None;
    let mut gaps: HashMap<(String, String), Rational> = HashMap::new();
    for x in &words {
        for y in &words {
            let total = x.len() + y.len();
            if total > max_total {
                continue;
            }
            let g = xy_gap(x, y)?;
            r.instances_checked += 1;
            if x == y {
                if !g.is_zero() {
                    r.counterexamples.push(format!("gap({x}, {x}) = {}", rational_to_string(&g)));
                }
            } else {
                let floor = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(5), total));
                let margin = &g - &floor;
                if !margin.is_positive() {
                    r.counterexamples.push(format!("gap({x:?}, {y:?}) = {} ≤ 5^-{total}", rational_to_string(&g)));
                }
                let rel = &g / &floor;
                if min_margin.as_ref().is_none_or(|m| rel < *m) {
                    min_margin = Some(rel);
                }
            }
            if let Some(other) = gaps.get(&(y.clone(), x.clone())) {
                if *other != g {
                    r.counterexamples.push(format!("gap({x:?}, {y:?}) differs from gap({y:?}, {x:?})"));
                }
            }
            gaps.insert((x.clone(), y.clone()), g);
        }
    }
    r.min_margin = min_margin.map(|m| format!("gap / 5^-(n+m) ≥ {}", rational_to_string(&m)));
    Ok(r)
}

/// Certifies `sin²(√2·d·π) > 1/(2d²+1)` for `1 ≤ d ≤ d_max`, raising the
/// interval precision until each comparison is decided.
pub fn rotation_bound_audit(d_max: u64) -> Result<OracleReport, OracleError> {
    if d_max == 0 {
        return Err(OracleError::Cap("d_max must be at least 1".into()));
    }
    let mut r = OracleReport::new("sin²(√2·d·π) > 1/(2d²+1)", d_max);
    let mut min_ratio = f64::INFINITY;
    let mut max_prec = 0;
    for d in 1..=d_max {
        let bound = Rational::new(BigInt::one(), BigInt::from(2 * d * d + 1));
        let (holds, prec) = certify_with_escalation(DEFAULT_PRECISION, |p| {
            let iv = rotation_reject_probability(d as i64, p);
            if iv.certainly_gt(&bound) {
                Some(true)
            } else if iv.certainly_le(&bound) {
                Some(false)
            } else {
                None
            }
        })
        .map_err(|e| OracleError::Inconclusive(format!("d = {d}: {e}")))?;
        r.instances_checked += 1;
        max_prec = max_prec.max(prec);
        if !holds {
            r.counterexamples.push(format!("d = {d}"));
        }
        let iv = rotation_reject_probability(d as i64, prec);
        min_ratio = min_ratio.min(rational_to_f64(&iv.lo()) / rational_to_f64(&bound));
    }
    r.min_margin = Some(format!("sin² / bound ≥ {min_ratio:.6}"));
    r.notes.push(("largest precision used (bits)".into(), max_prec as u64));
    Ok(r)
}

#[cfg(test)]
mod tests;
