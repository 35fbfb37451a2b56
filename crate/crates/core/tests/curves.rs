use cyarith::cm_curves::{self, normalize_twist, CurveSpec, Family};
use cyarith::jacobian;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Three), Just(Family::Four), Just(Family::Six)]
}

#[test]
fn known_traces() {
    let e4 = CurveSpec::new(Family::Four, 1).unwrap();
    let got: Vec<i64> = [3, 5, 7, 13, 17].iter().map(|&p| cm_curves::ap_via_cm(&e4, p).unwrap()).collect();
    assert_eq!(got, vec![0, -2, 0, 6, 2]);
    let e7 = CurveSpec::roan();
    assert_eq!(cm_curves::ap_via_cm(&e7, 11).unwrap(), 4);
    assert!(cm_curves::ap_via_cm(&e4, 2).is_err());
    assert!(cm_curves::ap_via_cm(&e4, 15).is_err());
}

#[test]
fn fourth_power_twists_share_tables() {
    let a = CurveSpec::new(Family::Four, 3).unwrap();
    let b = CurveSpec::new(Family::Four, 3 * 16).unwrap();
    assert_eq!(a, b);
    for p in cm_curves::good_primes(&a, 500) {
        assert_eq!(cm_curves::count_points_naive(&a, p).unwrap(), cm_curves::count_points_naive(&b, p).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cm_trace_equals_point_count(f in family(), t in -40i64..40, idx in 0usize..60) {
        prop_assume!(t != 0);
        let c = CurveSpec::new(f, t).unwrap();
        let primes = cm_curves::good_primes(&c, 2000);
        let p = primes[idx % primes.len()];
        let a = cm_curves::ap_via_cm(&c, p).unwrap();
        prop_assert_eq!(a, cm_curves::count_points_naive(&c, p).unwrap());
        prop_assert!((a * a) as u64 <= 4 * p);
    }

    #[test]
    fn normalization_idempotent(t in -100_000i64..100_000, k in prop::sample::select(vec![4u32, 6])) {
        prop_assume!(t != 0);
        let once = normalize_twist(t, k).unwrap();
        prop_assert_eq!(normalize_twist(once, k).unwrap(), once);
    }

    #[test]
    fn order_insensitive_to_powers(t in 1i64..200, s in 1i64..6, neg in any::<bool>()) {
        let t = if neg { -t } else { t };
        prop_assert_eq!(
            jacobian::character_order(Family::Four, &[(t, 1)]).unwrap(),
            jacobian::character_order(Family::Four, &[(t * s.pow(4), 1)]).unwrap()
        );
        prop_assert_eq!(
            jacobian::character_order(Family::Six, &[(t, 1)]).unwrap(),
            jacobian::character_order(Family::Six, &[(t, 1), (s, 6)]).unwrap()
        );
    }

    #[test]
    fn q_model_ignores_order(f in family(), a in -9i64..9, b in -9i64..9, c in -9i64..9, k in 1u32..4) {
        prop_assume!(a != 0 && b != 0 && c != 0);
        let m1 = jacobian::q_model(f, &[(a, k), (b, 1), (c, 2)]).unwrap();
        let m2 = jacobian::q_model(f, &[(c, 2), (a, k), (b, 1)]).unwrap();
        prop_assert_eq!(m1, m2);
    }

    #[test]
    fn nfold_at_three_is_yui(f in family(), a in -9i64..9, k in 1u32..6) {
        prop_assume!(a != 0);
        let tw = [(a, k), (1, 1), (1, 1)];
        prop_assert_eq!(
            jacobian::nfold_verdict(f, 3, &tw).unwrap().holds,
            jacobian::yui_verdict(f, &tw).unwrap().holds
        );
    }
}
