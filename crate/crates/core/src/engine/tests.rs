use super::*;
use crate::numerics::{rat, Prob, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn exact(p: i64, q: i64) -> Prob {
    Prob::exact(rat(p, q))
}

#[test]
fn only_rejection_absorbs() {
    let s = closed_form_total(&RoundOutcome::new(Prob::zero(), exact(1, 3), Prob::one())).unwrap();
    assert!(s.reject_prob().is_exact_one());
    assert!(s.accept_prob().is_exact_zero());
}

#[test]
fn even_odds_reject_two_thirds() {
    let s = closed_form_total(&RoundOutcome::new(exact(1, 2), exact(1, 2), exact(10, 1))).unwrap();
    assert_eq!(s.reject_prob(), &exact(2, 3));
    assert_eq!(s.expected_rounds.as_ref().unwrap().certified().unwrap(), &exact(4, 3));
    assert!(s.conserves_mass());
}

#[test]
fn never_halting_round_is_an_error() {
    let r = closed_form_total(&RoundOutcome::new(Prob::zero(), Prob::zero(), Prob::one()));
    assert!(matches!(r, Err(EngineError::NeverHalts(_))));
}

#[test]
fn interval_inputs_give_enclosing_ratio() {
    let pr = Prob::Interval(crate::numerics::CertifiedInterval::between(&rat(1, 3), &rat(1, 2), 64));
    let r = closed_form_ratio(&exact(1, 8), &pr).unwrap();
    // endpoints: (1/3)/(1/8 + 1/3 - 1/24) and (1/2)/(1/8 + 1/2 - 1/16)
    assert!(r.contains(&rat(8, 10)));
    assert!(r.contains(&rat(8, 9)));
    assert!(!r.contains(&rat(7, 10)));
}

#[test]
fn clopper_pearson_brackets_extremes() {
    let (lo, hi) = clopper_pearson(0, 1000);
    assert_eq!(lo, 0.0);
    // (1 - 0.005)^(1/1000) complement
    assert!((hi - (1.0 - 0.005f64.powf(1.0 / 1000.0))).abs() < 1e-9);
    let (lo, hi) = clopper_pearson(1000, 1000);
    assert_eq!(hi, 1.0);
    assert!((lo - 0.005f64.powf(1.0 / 1000.0)).abs() < 1e-9);
}

proptest! {
    /// Truncating the series after N rounds leaves exactly `c^N` times the
    /// closed form, with `c = (1-P_a)(1-P_r)`.
    #[test]
    fn geometric_tail_identity(a in 1i64..50, r in 1i64..50, d in 50i64..60, n in 0u32..12) {
        let (pa, pr) = (rat(a, d), rat(r, d));
        let total = closed_form_ratio(&Prob::exact(pa.clone()), &Prob::exact(pr.clone())).unwrap();
        let total = total.as_exact().unwrap().clone();
        let c = (Rational::one() - &pa) * (Rational::one() - &pr);
        let mut partial = Rational::zero();
        let mut ci = Rational::one();
        for _ in 0..n {
            partial += &ci * &pr;
            ci *= &c;
        }
        prop_assert_eq!(&total - &partial, ci * &total);
    }

    #[test]
    fn ratio_is_a_probability(a in 0i64..=20, r in 1i64..=20) {
        let p = closed_form_ratio(&exact(a, 20), &exact(r, 20)).unwrap();
        prop_assert!(p.contains(&p.lo()) && p.lo() >= Rational::zero() && p.hi() <= Rational::one());
    }
}

#[test]
fn step_tracking_does_not_change_probabilities() {
    let card = crate::machines::Family::Twin.build(&rat(1, 4)).unwrap();
    let quiet = EngineOptions { expected_steps: false, ..EngineOptions::default() };
    for w in ["abcab", "abcba", "bacab"] {
        let full = analyze_exact(&card.machine, w, &EngineOptions::default()).unwrap();
        let lean = analyze_exact(&card.machine, w, &quiet).unwrap();
        assert_eq!(full.reject_prob(), lean.reject_prob(), "{w}");
        assert!(full.expected_steps.is_some());
        assert!(lean.expected_steps.is_none());
    }
}
