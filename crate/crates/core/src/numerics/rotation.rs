use super::{CertifiedInterval, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// The qubit state `cos(tα)|q0⟩ + sin(tα)|q1⟩`, `α = √2·π`, kept as the
/// integer `t`. Rotations compose by adding turn counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RotationIndex {
    pub turns: i64,
}

impl RotationIndex {
    pub fn new(turns: i64) -> Self {
        RotationIndex { turns }
    }

    pub fn rotate(self, by: i64) -> Self {
        RotationIndex { turns: self.turns + by }
    }

    /// Probability of observing `|q1⟩`, i.e. `sin²(√2·t·π)`.
    pub fn reject_probability(&self, precision: u32) -> CertifiedInterval {
        rotation_reject_probability(self.turns, precision)
    }
}

const GUARD_BITS: u32 = 40;

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

/// `atan(1/k)` on the `2^-w` grid, with series tail bound.
fn atan_inv(k: u64, w: u32) -> CertifiedInterval {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let one = pow2(w);
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut power = k.clone();
    let mut j: u64 = 0;
    loop {
        let denom = &power * BigInt::from(2 * j + 1);
        // term = 1/denom, truncated
        let t_lo = one.div_floor(&denom);
        let t_hi = &t_lo + 1;
        if j % 2 == 0 {
            lo += &t_lo;
            hi += &t_hi;
        } else {
            lo -= &t_hi;
            hi -= &t_lo;
        }
        if t_lo.is_zero() {
            // remaining tail is below one ulp in magnitude
            lo -= 1;
            hi += 1;
            break;
        }
        power *= &k2;
        j += 1;
    }
    CertifiedInterval::from_raw(lo, hi, w)
}

/// π as a certified interval on the `2^-w` grid (Machin's formula).
pub(crate) fn pi_interval(w: u32) -> CertifiedInterval {
    static CACHE: OnceLock<Mutex<HashMap<u32, CertifiedInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&w) {
        return v.clone();
    }
    let inner = w + 16;
    let a = atan_inv(5, inner);
    let b = atan_inv(239, inner);
    let pi = a.mul(&CertifiedInterval::from_int(16, inner)).sub(&b.mul(&CertifiedInterval::from_int(4, inner)));
    let pi = pi.with_precision(w);
    cache.lock().unwrap().insert(w, pi.clone());
    pi
}

/// Taylor evaluation of `(sin x, cos x)` with a Lagrange remainder term.
fn sin_cos_taylor(x: &CertifiedInterval) -> (CertifiedInterval, CertifiedInterval) {
    let w = x.precision();
    let bound = {
        let m = x.lo_raw().abs().max(x.hi_raw().abs());
        // |x| ≤ bound_int
        let b: BigInt = (m >> w) + 1;
        b.to_string().parse::<u64>().unwrap_or(u64::MAX)
    };
    let mut sin = CertifiedInterval::zero(w);
    let mut cos = CertifiedInterval::zero(w);
    let mut term = CertifiedInterval::one(w); // x^n / n!
    let mut n: u64 = 0;
    // magnitude bound on x^n / n!
    let mut mag = Rational::one();
    let b = Rational::from_integer(BigInt::from(bound));
    let eps = Rational::new(BigInt::one(), pow2(w));
    loop {
        match n % 4 {
            0 => cos = cos.add(&term),
            1 => sin = sin.add(&term),
            2 => cos = cos.sub(&term),
            _ => sin = sin.sub(&term),
        }
        n += 1;
        term = term.mul(x).div_int(n);
        mag = mag * &b / Rational::from_integer(BigInt::from(n));
        if n > bound && mag < eps {
            break;
        }
    }
    // remainder of both series after this point is at most mag
    let r = CertifiedInterval::between(&(-mag.clone()), &mag, w);
    (sin.add(&r), cos.add(&r))
}

/// `sin(π·y)` for a point `y ∈ [0, 1/2]` given on the `2^-w` grid.
fn sin_pi_point(y_raw: &BigInt, w: u32) -> CertifiedInterval {
    let y = CertifiedInterval::from_raw(y_raw.clone(), y_raw.clone(), w);
    let x = y.mul(&pi_interval(w));
    sin_cos_taylor(&x).0
}

/// Certified `sin²(π·f)` for an interval `f` of width below `1/4`.
pub fn sin_sq_pi(f: &CertifiedInterval) -> CertifiedInterval {
    let w = f.precision();
    let one = pow2(w);
    let half = pow2(w - 1);
    // shift so that lo ∈ [0, 1)
    let shift = f.lo_raw().div_floor(&one) * &one;
    let a = f.lo_raw() - &shift;
    let b = f.hi_raw() - &shift;
    assert!(&b - &a < (&one >> 2u32), "argument interval too wide for sin² evaluation");
    let at = |v: &BigInt| -> CertifiedInterval {
        let r = v.mod_floor(&one);
        let folded = if r > half { &one - &r } else { r };
        sin_pi_point(&folded, w).square().clamp_unit()
    };
    let ga = at(&a);
    let gb = at(&b);
    let mut lo = ga.lo().min(gb.lo());
    let mut hi = ga.hi().max(gb.hi());
    // interior extrema: zeros at integers, maxima at half-integers
    let contains = |v: &BigInt| &a <= v && v <= &b;
    if contains(&one) {
        lo = Rational::zero();
    }
    if contains(&half) || contains(&(&one + &half)) {
        hi = Rational::one();
    }
    CertifiedInterval::between(&lo, &hi, w).clamp_unit()
}

/// `√2·t` on the `2^-w` grid (exact integer square root, so the interval
/// has width one ulp).
fn sqrt2_times(t: i64, w: u32) -> CertifiedInterval {
    let n: BigInt = BigInt::from(t).pow(2) * 2 * pow2(2 * w);
    let s = n.sqrt();
    let (lo, hi) = if &s * &s == n { (s.clone(), s) } else { (s.clone(), s + 1) };
    let i = CertifiedInterval::from_raw(lo, hi, w);
    if t < 0 {
        i.neg()
    } else {
        i
    }
}

/// Certified `sin²(√2·t·π + j·π/4)`, the `|q1⟩` probability of the rotated
/// qubit with an extra quarter offset `j`.
pub(crate) fn rotor_q1_probability(turns: i64, quarters: u8, precision: u32) -> CertifiedInterval {
    let w = precision + GUARD_BITS + 64;
    let phase = sqrt2_times(turns, w).add(&CertifiedInterval::from_rational(
        &Rational::new(BigInt::from(quarters), BigInt::from(4)),
        w,
    ));
    sin_sq_pi(&phase).with_precision(precision).clamp_unit()
}

/// `sin²(√2·t·π)`: the probability that the rotation machine observes
/// `|q1⟩` after a net rotation of `t` turns. The interval is computed with
/// guard bits and then rounded to `precision`.
pub fn rotation_reject_probability(turns: i64, precision: u32) -> CertifiedInterval {
    let precision = precision.max(64);
    if turns == 0 {
        return CertifiedInterval::zero(precision);
    }
    rotor_q1_probability(turns, 0, precision)
}

/// `(sin(√2·t·π), cos(√2·t·π))` as certified intervals.
pub fn sin_cos_turns(turns: i64, precision: u32) -> (CertifiedInterval, CertifiedInterval) {
    let w = precision + GUARD_BITS + 64;
    let two = pow2(w + 1);
    // reduce √2·t modulo 2, into [-1, 1)
    let phase = sqrt2_times(turns, w);
    let shift = (phase.lo_raw() + pow2(w)).div_floor(&two) * &two;
    let reduced = CertifiedInterval::from_raw(phase.lo_raw() - &shift, phase.hi_raw() - &shift, w);
    let x = reduced.mul(&pi_interval(w));
    let (s, c) = sin_cos_taylor(&x);
    (s.with_precision(precision), c.with_precision(precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    #[test]
    fn pi_brackets_known_digits() {
        let p = pi_interval(200);
        assert!(p.certainly_gt(&rat(314159265358979, 100000000000000)));
        assert!(p.certainly_lt(&rat(314159265358980, 100000000000000)));
        assert!(p.width_log2() < -190.0);
    }

    #[test]
    fn zero_turns_is_exactly_zero() {
        let p = rotation_reject_probability(0, 256);
        assert!(p.contains(&rat(0, 1)));
        assert_eq!(p.width(), rat(0, 1));
    }

    #[test]
    fn one_turn_matches_high_precision_value() {
        // sin²(√2π) = 0.928985...; reference from an independent
        // double-precision evaluation of sin(√2·π)².
        let p = rotation_reject_probability(1, 256);
        let reference = (2f64.sqrt() * std::f64::consts::PI).sin().powi(2);
        assert!((p.mid_f64() - reference).abs() < 1e-12);
        assert!(p.width_log2() <= -(256.0 - 8.0));
        assert!(p.certainly_gt(&rat(1, 3)));
    }

    #[test]
    fn five_turns_beats_lemma_bound() {
        assert!(rotation_reject_probability(5, 256).certainly_ge(&rat(1, 51)));
    }

    #[test]
    fn evenness_of_sin_squared() {
        for t in 1..40 {
            let a = rotation_reject_probability(t, 128);
            let b = rotation_reject_probability(-t, 128);
            assert!(a.overlaps(&b));
        }
    }

    #[test]
    fn width_shrinks_with_precision() {
        let coarse = rotation_reject_probability(99, 64);
        let fine = rotation_reject_probability(99, 512);
        assert!(fine.width() <= coarse.width());
        assert!(fine.overlaps(&coarse));
    }

    #[test]
    fn sin_cos_pythagoras() {
        for t in [-7i64, -1, 1, 2, 5, 12, 29, 70] {
            let (s, c) = sin_cos_turns(t, 128);
            let sum = s.square().add(&c.square());
            assert!(sum.contains(&rat(1, 1)), "t={t}");
            let f = (2f64.sqrt() * t as f64 * std::f64::consts::PI).sin();
            assert!((s.mid_f64() - f).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn quarter_offsets() {
        let half = rotor_q1_probability(0, 1, 128);
        assert!(half.contains(&rat(1, 2)));
        let one = rotor_q1_probability(0, 2, 128);
        assert!(one.contains(&rat(1, 1)));
    }
}
