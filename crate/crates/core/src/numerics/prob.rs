use super::{rational_to_f64, rational_to_string, CertifiedInterval, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use std::fmt;

/// A probability that is either known exactly or enclosed by a certified
/// interval. Arithmetic stays exact until an interval operand appears.
#[derive(Clone, PartialEq, Eq)]
pub enum Prob {
    Exact(Rational),
    Interval(CertifiedInterval),
}

impl Prob {
    pub fn zero() -> Prob {
        Prob::Exact(Rational::zero())
    }

    pub fn one() -> Prob {
        Prob::Exact(Rational::one())
    }

    pub fn exact(q: Rational) -> Prob {
        Prob::Exact(q)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Prob::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Prob::Exact(q) => Some(q),
            Prob::Interval(_) => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Prob::Exact(q) if q.is_zero())
    }

    pub fn is_exact_one(&self) -> bool {
        matches!(self, Prob::Exact(q) if q.is_one())
    }

    pub fn to_interval(&self, prec: u32) -> CertifiedInterval {
        match self {
            Prob::Exact(q) => CertifiedInterval::from_rational(q, prec),
            Prob::Interval(i) => i.clone(),
        }
    }

    fn binary(
        &self,
        other: &Prob,
        exact: impl FnOnce(&Rational, &Rational) -> Rational,
        interval: impl FnOnce(&CertifiedInterval, &CertifiedInterval) -> CertifiedInterval,
    ) -> Prob {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(exact(a, b)),
            (Prob::Interval(a), Prob::Exact(b)) => {
                Prob::Interval(interval(a, &CertifiedInterval::from_rational(b, a.precision())))
            }
            (Prob::Exact(a), Prob::Interval(b)) => {
                Prob::Interval(interval(&CertifiedInterval::from_rational(a, b.precision()), b))
            }
            (Prob::Interval(a), Prob::Interval(b)) => Prob::Interval(interval(a, b)),
        }
    }

    pub fn add(&self, other: &Prob) -> Prob {
        if other.is_exact_zero() {
            return self.clone();
        }
        if self.is_exact_zero() {
            return other.clone();
        }
        self.binary(other, |a, b| a + b, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Prob) -> Prob {
        if other.is_exact_zero() {
            return self.clone();
        }
        self.binary(other, |a, b| a - b, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &Prob) -> Prob {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Prob::zero();
        }
        if self.is_exact_one() {
            return other.clone();
        }
        if other.is_exact_one() {
            return self.clone();
        }
        self.binary(other, |a, b| a * b, |a, b| a.mul(b))
    }

    /// Division; `None` if the divisor may be zero.
    pub fn div(&self, other: &Prob) -> Option<Prob> {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) => (!b.is_zero()).then(|| Prob::Exact(a / b)),
            _ => {
                let p = self.precision().max(other.precision());
                self.to_interval(p).div(&other.to_interval(p)).map(Prob::Interval)
            }
        }
    }

    pub fn one_minus(&self) -> Prob {
        Prob::one().sub(self)
    }

    /// Clamps interval endpoints into `[0, 1]`.
    pub fn clamp_unit(self) -> Prob {
        match self {
            Prob::Interval(i) => Prob::Interval(i.clamp_unit()),
            e => e,
        }
    }

    pub fn clamp_nonneg(self) -> Prob {
        match self {
            Prob::Interval(i) => Prob::Interval(i.clamp_nonneg()),
            e => e,
        }
    }

    pub fn precision(&self) -> u32 {
        match self {
            Prob::Exact(_) => 0,
            Prob::Interval(i) => i.precision(),
        }
    }

    pub fn lo(&self) -> Rational {
        match self {
            Prob::Exact(q) => q.clone(),
            Prob::Interval(i) => i.lo(),
        }
    }

    pub fn hi(&self) -> Rational {
        match self {
            Prob::Exact(q) => q.clone(),
            Prob::Interval(i) => i.hi(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(q) => rational_to_f64(q),
            Prob::Interval(i) => i.mid_f64(),
        }
    }

    pub fn width(&self) -> Rational {
        self.hi() - self.lo()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo() <= q && q <= &self.hi()
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo().is_positive()
    }

    pub fn certainly_gt(&self, q: &Rational) -> bool {
        &self.lo() > q
    }

    pub fn certainly_ge(&self, q: &Rational) -> bool {
        &self.lo() >= q
    }

    pub fn overlaps(&self, other: &Prob) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }

    /// `"p/q"` for exact values, `"[lo, hi]"` for intervals.
    pub fn render(&self) -> String {
        match self {
            Prob::Exact(q) => rational_to_string(q),
            Prob::Interval(i) => format!("[{}, {}]", rational_to_string(&i.lo()), rational_to_string(&i.hi())),
        }
    }

    pub fn provenance(&self) -> &'static str {
        match self {
            Prob::Exact(_) => "exact",
            Prob::Interval(_) => "certified-interval",
        }
    }
}

impl fmt::Debug for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(q) => write!(f, "{}", rational_to_string(q)),
            Prob::Interval(i) => write!(f, "{:?}", i),
        }
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(q) => write!(f, "{}", rational_to_string(q)),
            Prob::Interval(i) => write!(f, "{}", i),
        }
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Prob", 3)?;
        st.serialize_field("value", &self.render())?;
        st.serialize_field("float", &self.to_f64())?;
        st.serialize_field("provenance", self.provenance())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    #[test]
    fn exact_stays_exact() {
        let a = Prob::exact(rat(1, 2));
        let b = Prob::exact(rat(1, 3));
        assert_eq!(a.mul(&b), Prob::exact(rat(1, 6)));
        assert_eq!(a.add(&b).one_minus(), Prob::exact(rat(1, 6)));
        assert_eq!(a.div(&b).unwrap(), Prob::exact(rat(3, 2)));
        assert!(a.div(&Prob::zero()).is_none());
    }

    #[test]
    fn mixing_promotes_to_interval() {
        let a = Prob::exact(rat(1, 2));
        let b = Prob::Interval(CertifiedInterval::from_rational(&rat(1, 3), 64));
        let c = a.mul(&b);
        assert!(!c.is_exact());
        assert!(c.contains(&rat(1, 6)));
        assert_eq!(Prob::zero().mul(&b), Prob::zero());
    }
}
