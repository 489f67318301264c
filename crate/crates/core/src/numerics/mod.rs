//! Number representations used by the exact engines.
//!
//! * [`Rational`]: arbitrary-precision rationals, used for every probability
//!   that is exactly rational (coin flips, random-walk absorption, 5-adic
//!   measurement outcomes).
//! * [`FiveAdicVector`]: integer vectors over a power of five, the exact
//!   amplitudes produced by the Pythagorean rotations `A/5` and `B/5`.
//! * [`RotationIndex`]: the qubit state `cos(tα)|q0⟩ + sin(tα)|q1⟩` with
//!   `α = √2·π`, stored by its integer turn count.
//! * [`CertifiedInterval`]: outward-rounded dyadic intervals for the
//!   irrational quantities (`sin²(√2·t·π)` and friends).
//! * [`Prob`]: a probability that is either exact or certified.

mod five_adic;
mod interval;
mod prob;
mod rotation;

pub use five_adic::{FiveAdicVector, Generator};
pub use interval::{certify_with_escalation, CertifiedInterval, DEFAULT_PRECISION, MAX_PRECISION};
pub use prob::Prob;
pub use rotation::{rotation_reject_probability, sin_cos_turns, sin_sq_pi, RotationIndex};
pub(crate) use rotation::rotor_q1_probability;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

/// Exact rational number; always normalised with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum NumericsError {
    #[error("matrix is not one of the generators A, B, A^-1*25, B^-1*25")]
    NotAGenerator,
    #[error("vector has {0} entries, expected 3")]
    WrongLength(usize),
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
    #[error("certification inconclusive at {0} bits")]
    Inconclusive(u32),
}

/// Shorthand for `p/q` as a [`Rational`].
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `2^-k` as a rational.
pub fn pow2_inv(k: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Renders a rational as `p/q` (denominator always present).
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `p/q`, a plain integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational, NumericsError> {
    let bad = || NumericsError::BadRational(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = if frac.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(frac).map_err(|_| bad())?
        };
        let magnitude = int_part.abs() * &scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, scale));
    }
    BigInt::from_str(t).map(Rational::from_integer).map_err(|_| bad())
}

/// Smallest `j ≥ 0` with `2^j ≥ x`, for positive rational `x`.
pub fn ceil_log2(x: &Rational) -> u64 {
    assert!(x.is_positive(), "ceil_log2 of a non-positive value");
    let mut j = 0u64;
    let mut p = Rational::one();
    while &p < x {
        p *= Rational::from_integer(BigInt::from(2));
        j += 1;
    }
    j
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::{parse_rational, rational_to_string, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod serde_bigint_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| BigInt::from_str(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_rational_forms() {
        assert_eq!(parse_rational("1/4").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational(".125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn ceil_log2_matches_powers() {
        assert_eq!(ceil_log2(&rat(4, 1)), 2);
        assert_eq!(ceil_log2(&rat(5, 1)), 3);
        assert_eq!(ceil_log2(&rat(1, 1)), 0);
        assert_eq!(ceil_log2(&rat(8, 1)), 3);
    }

    #[test]
    fn rational_strings_keep_denominator() {
        assert_eq!(rational_to_string(&rat(2, 1)), "2/1");
        assert_eq!(rational_to_string(&rat(369, 625)), "369/625");
    }
}
