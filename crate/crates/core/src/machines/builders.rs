use super::layout::{coin_flips, goto, measure, unitary, Layout, ACCEPT, REJECT};
use super::{check_epsilon, MachineCard, MachineError};
use crate::automata::{Backend, Operator, LEFT_END, RIGHT_END};
use crate::engine::closed_form_ratio;
use crate::numerics::{ceil_log2, pow2_inv, rat, rotation_reject_probability, Prob, Rational};
use num_traits::One;

const AB: [char; 2] = ['a', 'b'];
const ABC: [char; 3] = ['a', 'b', 'c'];
const CERTIFY_PRECISION: u32 = 256;
/// Largest coin-flip count tried by the exact-length builder.
pub const MAX_COIN_FLIPS: u32 = 64;

fn with(symbols: &[char], extra: char) -> Vec<char> {
    let mut v = symbols.to_vec();
    v.push(extra);
    v
}

/// `1 + ⌈log₂(1/ε)⌉`.
pub fn rotation_coin_flips(eps: &Rational) -> u32 {
    1 + ceil_log2(&(Rational::one() / eps)) as u32
}

/// `max(3, ⌈log₂(1/ε)⌉)`; 3 is `⌈log₂ 5⌉`.
pub fn twin_coin_flips(eps: &Rational) -> u32 {
    (ceil_log2(&(Rational::one() / eps)) as u32).max(3)
}

/// Measurement at `$` after the sweep, the two random walks, the coin
/// flips and the restart shared by the length and equality checkers.
fn walks_and_coins(l: &mut Layout, sigma: &[char], k: u32) {
    let sd = with(sigma, RIGHT_END);
    l.on("rewind1", &sd, goto("rewind1", -1)).on("rewind1", &[LEFT_END], goto("walk1", 1));
    for (walk, step, after) in [("walk1", "step1", "rewind2"), ("walk2", "step2", "flip1")] {
        l.on(walk, sigma, unitary(Operator::Hadamard { block: 0 }, step, 0))
            .on(walk, &[LEFT_END], goto("restart", 0))
            .on(step, sigma, measure(&[("q0", walk, -1), ("q1", walk, 1)]));
        if after == "rewind2" {
            l.on(walk, &[RIGHT_END], goto(after, -1));
        } else {
            l.on(walk, &[RIGHT_END], goto(after, 0));
        }
    }
    l.on("rewind2", &sd, goto("rewind2", -1)).on("rewind2", &[LEFT_END], goto("walk2", 1));
    coin_flips(l, k, &[RIGHT_END], &["q0"], "restart", ACCEPT, 0);
    restart(l, sigma, "init", &["q1"]);
}

/// Walks back to `¢`, then resets the quantum state to `q0` (measuring it
/// and swapping the outcome back) and enters `start`.
fn restart(l: &mut Layout, sigma: &[char], start: &str, others: &[&str]) {
    l.on("restart", &with(sigma, RIGHT_END), goto("restart", -1));
    let mut outs: Vec<(String, String)> = vec![("q0".into(), start.into())];
    for (i, q) in others.iter().enumerate() {
        let fix = if others.len() == 1 { "fix".to_string() } else { format!("fix{}", i + 1) };
        l.on(&fix, &[LEFT_END], unitary(Operator::Swap { a: "q0".into(), b: q.to_string() }, start, 0));
        outs.push((q.to_string(), fix));
    }
    let o: Vec<(&str, &str, i8)> = outs.iter().map(|(q, n)| (q.as_str(), n.as_str(), 0)).collect();
    l.on("restart", &[LEFT_END], measure(&o));
}

/// The rotation-based checker for the promise problem "|w| = m" versus
/// "|w| ≠ m and |w| ≥ m/2".
pub fn build_length_checker(m: u64, eps: &Rational) -> Result<MachineCard, MachineError> {
    check_epsilon(eps)?;
    if m == 0 {
        return Err(MachineError::Parameter("m must be at least 1".into()));
    }
    let k = rotation_coin_flips(eps);
    let mut l = Layout::new(format!("length(m={m})"), Backend::Rotor, &["q0", "q1"], &AB);
    l.initial("init").round_start("init");
    l.on("init", &[LEFT_END], unitary(Operator::Rotate { block: 0, turns: m as i64 }, "sweep", 1))
        .on("sweep", &AB, unitary(Operator::Rotate { block: 0, turns: -1 }, "sweep", 1))
        .on("sweep", &[RIGHT_END], measure(&[("q0", "rewind1", -1), ("q1", REJECT, 0)]));
    walks_and_coins(&mut l, &AB, k);
    MachineCard::from_spec(l.finish(), format!("length(m={m})"), eps.clone(), vec![k], "O(|w|^4)", None)
}

/// Checker for `{aⁿbⁿ}`: rotate by `+α` per `a` and `−α` per `b` while a
/// classical sweep enforces the shape `a*b*`.
pub fn build_eq_checker(eps: &Rational) -> Result<MachineCard, MachineError> {
    check_epsilon(eps)?;
    let k = rotation_coin_flips(eps);
    let mut l = Layout::new("eq", Backend::Rotor, &["q0", "q1"], &AB);
    l.initial("init").round_start("init");
    let at_end = measure(&[("q0", "rewind1", -1), ("q1", REJECT, 0)]);
    l.on("init", &[LEFT_END], goto("sweep_a", 1))
        .on("sweep_a", &['a'], unitary(Operator::Rotate { block: 0, turns: 1 }, "sweep_a", 1))
        .on("sweep_a", &['b'], unitary(Operator::Rotate { block: 0, turns: -1 }, "sweep_b", 1))
        .on("sweep_a", &[RIGHT_END], at_end.clone())
        .on("sweep_b", &['b'], unitary(Operator::Rotate { block: 0, turns: -1 }, "sweep_b", 1))
        .on("sweep_b", &[RIGHT_END], at_end);
    walks_and_coins(&mut l, &AB, k);
    MachineCard::from_spec(l.finish(), "eq".into(), eps.clone(), vec![k], "O(|w|^4)", None)
}

fn generator(rows: [[i64; 3]; 3]) -> Operator {
    Operator::Matrix { block: 0, rows: rows.iter().map(|r| r.to_vec()).collect(), scale: 5 }
}

/// `A = [[4,3,0],[-3,4,0],[0,0,5]]`, so that `(A/5)|q0⟩ = 4/5|q0⟩ − 3/5|q1⟩`.
pub const MATRIX_A: [[i64; 3]; 3] = [[4, 3, 0], [-3, 4, 0], [0, 0, 5]];
/// `B = [[4,0,3],[0,5,0],[-3,0,4]]`.
pub const MATRIX_B: [[i64; 3]; 3] = [[4, 0, 3], [0, 5, 0], [-3, 0, 4]];

fn transpose(m: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut t = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

/// Recognizer for `{xcx : x ∈ {a,b}*}` using the Pythagorean rotations
/// `A/5`, `B/5` on three quantum states.
pub fn build_twin_recognizer(eps: &Rational) -> Result<MachineCard, MachineError> {
    check_epsilon(eps)?;
    let k = twin_coin_flips(eps);
    let mut l = Layout::new("twin", Backend::FiveAdic, &["q0", "q1", "q2"], &ABC);
    l.initial("check_x").round_start("start");
    // classical form check: exactly one c
    l.on("check_x", &[LEFT_END, 'a', 'b'], goto("check_x", 1))
        .on("check_x", &['c'], goto("check_y", 1))
        .on("check_y", &AB, goto("check_y", 1))
        .on("check_y", &[RIGHT_END], goto("rewind0", -1))
        .on("rewind0", &with(&ABC, RIGHT_END), goto("rewind0", -1))
        .on("rewind0", &[LEFT_END], goto("start", 0));
    // one round
    l.on("start", &[LEFT_END], goto("forward", 1))
        .on("forward", &['a'], unitary(generator(MATRIX_A), "forward", 1))
        .on("forward", &['b'], unitary(generator(MATRIX_B), "forward", 1))
        .on("forward", &['c'], goto("to_end", 1))
        .on("to_end", &AB, goto("to_end", 1))
        .on("to_end", &[RIGHT_END], goto("backward", -1))
        .on("backward", &['a'], unitary(generator(transpose(MATRIX_A)), "backward", -1))
        .on("backward", &['b'], unitary(generator(transpose(MATRIX_B)), "backward", -1))
        .on("backward", &['c'], measure(&[("q0", "to_end2", 1), ("q1", REJECT, 0), ("q2", REJECT, 0)]))
        .on("to_end2", &AB, goto("to_end2", 1))
        .on("to_end2", &[RIGHT_END], goto("flip1", -1));
    coin_flips(&mut l, k, &ABC, &["q0", "q2"], "restart", "flip1", -1);
    l.on("flip1", &[LEFT_END], goto(ACCEPT, 0));
    restart(&mut l, &ABC, "start", &["q1", "q2"]);
    MachineCard::from_spec(l.finish(), "twin".into(), eps.clone(), vec![k], "O(|w|·2^(k|w|))", None)
}

fn exact_length_spec(m: u64, k: u32, sigma: &[char]) -> crate::automata::MachineSpec {
    let mut l = Layout::new(format!("exact-length(m={m})"), Backend::Rotor, &["q0", "q1"], sigma);
    l.initial("init").round_start("init");
    let sd = with(sigma, RIGHT_END);
    l.on("init", &[LEFT_END], unitary(Operator::Rotate { block: 0, turns: m as i64 }, "sweep", 1))
        .on("sweep", sigma, unitary(Operator::Rotate { block: 0, turns: -1 }, "sweep", 1))
        .on("sweep", &[RIGHT_END], measure(&[("q0", "flip1", 0), ("q1", REJECT, 0)]));
    coin_flips(&mut l, k, &sd, &["q0"], "restart", "flip1", -1);
    l.on("flip1", &[LEFT_END], goto(ACCEPT, 0));
    restart(&mut l, sigma, "init", &["q1"]);
    l.finish()
}

/// Per-length rejection bound used by the exact-length builder: the lower
/// end of the certified closed-form reject total for an input of length
/// `n ≠ m`, with `P_a = 2^{-k(n+1)}`.
pub fn exact_length_reject_bound(m: u64, n: u64, k: u32) -> Result<Prob, MachineError> {
    let d = m as i64 - n as i64;
    let pr = Prob::Interval(rotation_reject_probability(d, CERTIFY_PRECISION));
    let pa = Prob::exact(pow2_inv(k as u64 * (n + 1)));
    closed_form_ratio(&pa, &pr).map_err(|e| MachineError::Certification(e.to_string()))
}

/// Lengths checked one by one before the monotone tail argument takes over.
const DIRECT_LENGTHS: u64 = 64;

/// Checks reject > 1 − ε for every length `n ≠ m`: directly for
/// `n ≤ m + DIRECT_LENGTHS`, and beyond that via `P_r ≥ 1/(2d²+1)` and the
/// fact that `2^{-k(n+1)}(2d²+1)` decreases in `n` once `k ≥ 2`.
pub fn certify_exact_length(m: u64, k: u32, eps: &Rational) -> Result<bool, MachineError> {
    let target = Rational::one() - eps;
    let last = m + DIRECT_LENGTHS;
    for n in 0..=last {
        if n == m {
            continue;
        }
        if !exact_length_reject_bound(m, n, k)?.certainly_gt(&target) {
            return Ok(false);
        }
    }
    if k < 2 {
        return Ok(false);
    }
    let n = last + 1;
    let d = (n - m) as i64;
    let ratio = pow2_inv(k as u64 * (n + 1)) * Rational::from_integer((2 * d * d + 1).into());
    Ok(ratio < eps / (Rational::one() - eps))
}

/// Checker for the language `{w : |w| = m}` without a promise: the
/// rotation test of the length checker, followed by `k` coin flips on each
/// of the `n+1` cells `$, wₙ, …, w₁`, so a round accepts with probability
/// `2^{-k(n+1)}`. `k` is raised until rejection `> 1 − ε` is certified for
/// every length.
pub fn build_exact_length_checker(m: u64, eps: &Rational) -> Result<MachineCard, MachineError> {
    build_exact_length_checker_over(m, eps, &AB)
}

pub fn build_exact_length_checker_over(m: u64, eps: &Rational, sigma: &[char]) -> Result<MachineCard, MachineError> {
    check_epsilon(eps)?;
    if m == 0 {
        return Err(MachineError::Parameter("m must be at least 1".into()));
    }
    let mut k = rotation_coin_flips(eps);
    while !certify_exact_length(m, k, eps)? {
        k += 1;
        if k > MAX_COIN_FLIPS {
            return Err(MachineError::Certification(format!(
                "no k ≤ {MAX_COIN_FLIPS} certifies error {} for m = {m}",
                crate::numerics::rational_to_string(eps)
            )));
        }
    }
    MachineCard::from_spec(
        exact_length_spec(m, k, sigma),
        format!("exact-length(m={m})"),
        eps.clone(),
        vec![k],
        "O(|w|·2^(k(|w|+1)))",
        None,
    )
}

/// `L^eq ∩ A(2m)` with error `ε/2` on each side.
pub fn build_aeq_solver(m: u64, eps: &Rational) -> Result<MachineCard, MachineError> {
    check_epsilon(eps)?;
    let half = eps * rat(1, 2);
    let card = super::intersect(&build_eq_checker(&half)?, &build_length_checker(2 * m, &half)?)?;
    Ok(card.renamed(format!("aeq(m={m})")))
}

/// `L^twin ∩ L(2m+1)` with error `ε/2` on each side.
pub fn build_twin_m_recognizer(m: u64, eps: &Rational) -> Result<MachineCard, MachineError> {
    check_epsilon(eps)?;
    let half = eps * rat(1, 2);
    let card = super::intersect(
        &build_twin_recognizer(&half)?,
        &build_exact_length_checker_over(2 * m + 1, &half, &ABC)?,
    )?;
    Ok(card.renamed(format!("twin-m(m={m})")))
}
