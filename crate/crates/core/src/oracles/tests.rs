use super::*;
use crate::numerics::rat;
use proptest::prelude::*;

#[test]
fn f_and_k_examples() {
    assert_eq!(f_value(&vec3(1, 0, 0)), 4.into());
    assert_eq!(f_value(&vec3(4, -3, 0)), 7.into());
    assert_eq!(f_value(&vec3(0, 0, 0)), 0.into());
    assert!(in_k(&vec3(1, 0, 0)));
    assert!(!in_k(&vec3(5, 0, 0)));
    assert!(in_k(&vec3(4, -3, 0)));
    assert!(!in_k(&vec3(0, 0, 0)));
}

#[test]
fn closure_edge_cases() {
    let r = verify_k_closure(0).unwrap();
    assert_eq!(r.instances_checked, 0);
    let r = verify_k_closure(1).unwrap();
    assert_eq!(r.instances_checked, 2);
    assert!(r.passed());
    assert!(verify_k_closure(WORD_CAP + 1).is_err());
}

#[test]
fn no_collision_small() {
    let r = verify_no_collision(4, 1000, 7).unwrap();
    assert!(r.passed(), "{:?}", r.counterexamples);
    assert!(verify_no_collision(0, 0, 0).unwrap().passed());
}

#[test]
fn basis_avoidance_small() {
    let r = verify_basis_avoidance(4).unwrap();
    assert!(r.passed(), "{:?}", r.counterexamples);
}

#[test]
fn gap_examples() {
    assert_eq!(xy_gap("A", "A").unwrap(), rat(0, 1));
    assert_eq!(xy_gap("A", "B").unwrap(), rat(369, 625));
    assert!(xy_gap("AB", "BA").unwrap() > rat(1, 625));
    assert!(xy_gap("AC", "").is_err());
}

#[test]
fn rotation_audit_small() {
    let r = rotation_bound_audit(12).unwrap();
    assert!(r.passed());
    assert_eq!(r.instances_checked, 12);
}

fn ab_word() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('A'), Just('B')], 0..6).prop_map(|v| v.into_iter().collect())
}

proptest! {
    #[test]
    fn gap_vanishes_on_equal_words(x in ab_word()) {
        prop_assert_eq!(xy_gap(&x, &x).unwrap(), rat(0, 1));
    }

    #[test]
    fn gap_is_symmetric(x in ab_word(), y in ab_word()) {
        prop_assert_eq!(xy_gap(&x, &y).unwrap(), xy_gap(&y, &x).unwrap());
    }

    #[test]
    fn reachable_vectors_lie_in_k(x in ab_word()) {
        let mut u = vec3(1, 0, 0);
        for c in x.chars() {
            u = generator(c).unwrap().mul_int(&u);
        }
        prop_assert!(in_k(&u));
    }
}
