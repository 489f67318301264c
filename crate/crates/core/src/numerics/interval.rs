use super::{NumericsError, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

pub const DEFAULT_PRECISION: u32 = 256;
pub const MAX_PRECISION: u32 = 4096;

/// A closed interval `[lo·2^-prec, hi·2^-prec]` with outward rounding.
///
/// Every operation rounds the lower endpoint down and the upper endpoint up
/// on the `2^-prec` grid, so the true value of any expression built from
/// these operations lies inside the result.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CertifiedInterval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

impl CertifiedInterval {
    pub fn from_raw(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        CertifiedInterval { lo, hi, prec }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let scaled = q.numer() << prec;
        let lo = floor_div(&scaled, q.denom());
        let hi = ceil_div(&scaled, q.denom());
        CertifiedInterval { lo, hi, prec }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        let v = BigInt::from(n) << prec;
        CertifiedInterval { lo: v.clone(), hi: v, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_int(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    /// Hull of two rational endpoints.
    pub fn between(a: &Rational, b: &Rational, prec: u32) -> Self {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        let lo = Self::from_rational(x, prec).lo;
        let hi = Self::from_rational(y, prec).hi;
        CertifiedInterval { lo, hi, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn lo(&self) -> Rational {
        Rational::new(self.lo.clone(), pow2(self.prec))
    }

    pub fn hi(&self) -> Rational {
        Rational::new(self.hi.clone(), pow2(self.prec))
    }

    pub fn width(&self) -> Rational {
        Rational::new(&self.hi - &self.lo, pow2(self.prec))
    }

    pub fn mid_f64(&self) -> f64 {
        super::rational_to_f64(&((self.lo() + self.hi()) / Rational::from_integer(2.into())))
    }

    /// `log2` of the width, or `-inf` for a point interval.
    pub fn width_log2(&self) -> f64 {
        let w = &self.hi - &self.lo;
        if w.is_zero() {
            return f64::NEG_INFINITY;
        }
        w.bits() as f64 - self.prec as f64
    }

    /// Re-expresses the interval on a different grid, rounding outward.
    pub fn with_precision(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = prec - self.prec;
                CertifiedInterval { lo: &self.lo << s, hi: &self.hi << s, prec }
            }
            Ordering::Less => {
                let d = pow2(self.prec - prec);
                CertifiedInterval { lo: floor_div(&self.lo, &d), hi: ceil_div(&self.hi, &d), prec }
            }
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let p = self.prec.max(other.prec);
        (self.with_precision(p), other.with_precision(p))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        CertifiedInterval { lo: a.lo + b.lo, hi: a.hi + b.hi, prec: a.prec }
    }

    pub fn neg(&self) -> Self {
        CertifiedInterval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        let d = pow2(a.prec);
        CertifiedInterval { lo: floor_div(min, &d), hi: ceil_div(max, &d), prec: a.prec }
    }

    /// Square, tight when the interval straddles zero.
    pub fn square(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = self.lo.abs().max(self.hi.clone());
            let d = pow2(self.prec);
            CertifiedInterval { lo: BigInt::zero(), hi: ceil_div(&(&m * &m), &d), prec: self.prec }
        } else {
            self.mul(self)
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Division; `None` when the divisor interval contains zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if other.contains_zero() {
            return None;
        }
        let (a, b) = self.aligned(other);
        let p = a.prec;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&a.lo, &a.hi] {
            for y in [&b.lo, &b.hi] {
                let num = x << p;
                let f = floor_div(&num, y);
                let c = ceil_div(&num, y);
                lo = Some(match lo {
                    Some(l) if l <= f => l,
                    _ => f,
                });
                hi = Some(match hi {
                    Some(h) if h >= c => h,
                    _ => c,
                });
            }
        }
        Some(CertifiedInterval { lo: lo.unwrap(), hi: hi.unwrap(), prec: p })
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        self.mul(&Self::from_rational(q, self.prec))
    }

    pub fn div_int(&self, n: u64) -> Self {
        let d = BigInt::from(n);
        CertifiedInterval { lo: floor_div(&self.lo, &d), hi: ceil_div(&self.hi, &d), prec: self.prec }
    }

    /// Square root of the non-negative part.
    pub fn sqrt(&self) -> Self {
        let p = self.prec;
        let lo = if self.lo.is_positive() { (&self.lo << p).sqrt() } else { BigInt::zero() };
        let hi = if self.hi.is_positive() {
            let n = &self.hi << p;
            let r = n.sqrt();
            if &r * &r == n {
                r
            } else {
                r + 1
            }
        } else {
            BigInt::zero()
        };
        CertifiedInterval { lo, hi, prec: p }
    }

    /// Intersects with `[0, 1]`; probabilities never leave the unit interval.
    pub fn clamp_unit(&self) -> Self {
        let one = pow2(self.prec);
        let lo = self.lo.clone().max(BigInt::zero()).min(one.clone());
        let hi = self.hi.clone().min(one).max(lo.clone());
        CertifiedInterval { lo, hi, prec: self.prec }
    }

    pub fn clamp_nonneg(&self) -> Self {
        let lo = self.lo.clone().max(BigInt::zero());
        let hi = self.hi.clone().max(lo.clone());
        CertifiedInterval { lo, hi, prec: self.prec }
    }

    pub fn hull(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        CertifiedInterval { lo: a.lo.min(b.lo), hi: a.hi.max(b.hi), prec: a.prec }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo() <= q && q <= &self.hi()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.lo <= b.hi && b.lo <= a.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        b.lo <= a.lo && a.hi <= b.hi
    }

    /// True when every point of the interval is `> q`.
    pub fn certainly_gt(&self, q: &Rational) -> bool {
        &self.lo() > q
    }

    pub fn certainly_ge(&self, q: &Rational) -> bool {
        &self.lo() >= q
    }

    pub fn certainly_lt(&self, q: &Rational) -> bool {
        &self.hi() < q
    }

    pub fn certainly_le(&self, q: &Rational) -> bool {
        &self.hi() <= q
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn lo_raw(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_raw(&self) -> &BigInt {
        &self.hi
    }
}

impl fmt::Debug for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6e}, {:.6e}]@{}", super::rational_to_f64(&self.lo()), super::rational_to_f64(&self.hi()), self.prec)
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", super::rational_to_f64(&self.lo()), super::rational_to_f64(&self.hi()))
    }
}

/// Runs `check` at increasing precision, doubling from `start` up to
/// [`MAX_PRECISION`]. `check` returns `Some(verdict)` once conclusive.
pub fn certify_with_escalation<T>(
    start: u32,
    mut check: impl FnMut(u32) -> Option<T>,
) -> Result<(T, u32), NumericsError> {
    let mut prec = start.max(64);
    loop {
        if let Some(v) = check(prec) {
            return Ok((v, prec));
        }
        if prec >= MAX_PRECISION {
            return Err(NumericsError::Inconclusive(prec));
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;
    use proptest::prelude::*;

    fn iv(q: Rational, p: u32) -> CertifiedInterval {
        CertifiedInterval::from_rational(&q, p)
    }

    #[test]
    fn rational_embedding_contains_value() {
        let third = rat(1, 3);
        let i = iv(third.clone(), 64);
        assert!(i.contains(&third));
        assert!(i.width() <= rat(1, 1) / Rational::from_integer(pow2(63)));
    }

    #[test]
    fn division_by_zero_interval_is_refused() {
        let a = iv(rat(1, 1), 64);
        let z = CertifiedInterval::between(&rat(-1, 10), &rat(1, 10), 64);
        assert!(a.div(&z).is_none());
    }

    #[test]
    fn sqrt_of_two_brackets() {
        let two = CertifiedInterval::from_int(2, 128);
        let r = two.sqrt();
        assert!(r.square().contains(&rat(2, 1)));
        assert!(r.certainly_gt(&rat(14142, 10000)));
        assert!(r.certainly_lt(&rat(14143, 10000)));
    }

    #[test]
    fn escalation_gives_up_at_cap() {
        let r: Result<((), u32), _> = certify_with_escalation(64, |_| None);
        assert_eq!(r.unwrap_err(), NumericsError::Inconclusive(MAX_PRECISION));
        let (_, p) = certify_with_escalation(64, |p| (p >= 512).then_some(())).unwrap();
        assert_eq!(p, 512);
    }

    #[derive(Clone, Debug)]
    enum Expr {
        Leaf(i64, i64),
        Add(Box<Expr>, Box<Expr>),
        Sub(Box<Expr>, Box<Expr>),
        Mul(Box<Expr>, Box<Expr>),
        Div(Box<Expr>, Box<Expr>),
    }

    fn exact(e: &Expr) -> Option<Rational> {
        Some(match e {
            Expr::Leaf(p, q) => rat(*p, *q),
            Expr::Add(a, b) => exact(a)? + exact(b)?,
            Expr::Sub(a, b) => exact(a)? - exact(b)?,
            Expr::Mul(a, b) => exact(a)? * exact(b)?,
            Expr::Div(a, b) => {
                let d = exact(b)?;
                if d.is_zero() {
                    return None;
                }
                exact(a)? / d
            }
        })
    }

    fn eval(e: &Expr, p: u32) -> Option<CertifiedInterval> {
        Some(match e {
            Expr::Leaf(a, b) => iv(rat(*a, *b), p),
            Expr::Add(a, b) => eval(a, p)?.add(&eval(b, p)?),
            Expr::Sub(a, b) => eval(a, p)?.sub(&eval(b, p)?),
            Expr::Mul(a, b) => eval(a, p)?.mul(&eval(b, p)?),
            Expr::Div(a, b) => eval(a, p)?.div(&eval(b, p)?)?,
        })
    }

    fn expr() -> impl Strategy<Value = Expr> {
        let leaf = (-50i64..50, 1i64..30).prop_map(|(p, q)| Expr::Leaf(p, q));
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn doubling_precision_nests_and_encloses(e in expr()) {
            let (Some(value), Some(coarse)) = (exact(&e), eval(&e, 64)) else { return Ok(()); };
            prop_assert!(coarse.contains(&value));
            if let Some(fine) = eval(&e, 128) {
                prop_assert!(fine.contains(&value));
                prop_assert!(fine.is_subset_of(&coarse));
                prop_assert!(fine.width() <= coarse.width());
            }
        }
    }
}

impl serde::Serialize for CertifiedInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CertifiedInterval", 3)?;
        st.serialize_field("lo", &self.lo.to_string())?;
        st.serialize_field("hi", &self.hi.to_string())?;
        st.serialize_field("precision", &self.prec)?;
        st.end()
    }
}
