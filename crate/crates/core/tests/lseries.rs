use cyarith::cm_curves::{CurveSpec, Family};
use cyarith::lseries::{self, cache, ApSource, DirichletCharacter, Origin};
use cyarith::quad_fields::hecke::hecke_character_of;
use proptest::prelude::*;

#[test]
fn threefold_examples() {
    let t = lseries::threefold_coefficients(Family::Four, &[(1, 1), (1, 1), (1, 1)], 30).unwrap();
    assert_eq!(t.level, 32);
    assert_eq!(t.weight, 3);
    assert_eq!(t.get(5), 22);
    assert_eq!(t.get(13), -18);
    let e7 = lseries::threefold_coefficients(Family::Seven, &[], 50).unwrap();
    assert_eq!(e7.level, 49);
}

#[test]
fn paths_agree_with_twists() {
    for (f, tw) in [(Family::Four, vec![(2, 1), (3, 1), (1, 1)]), (Family::Six, vec![(-2, 1), (5, 2), (1, 1)])] {
        let chi = lseries::nfold_character(f, 3, &tw).unwrap();
        let ideal = lseries::hecke_qexpansion(&chi, 1500).unwrap();
        let naive = lseries::nfold_table(f, 3, &tw, 1500, ApSource::Naive).unwrap();
        let cm = lseries::nfold_table(f, 3, &tw, 1500, ApSource::Cm).unwrap();
        assert_eq!(ideal.coefficients, naive.coefficients);
        assert_eq!(cm.coefficients, naive.coefficients);
        assert_eq!(ideal.origin, Origin::IdealSum);
    }
}

#[test]
fn quadratic_twist_by_dirichlet_character() {
    let base = lseries::curve_coefficients(&CurveSpec::new(Family::Four, 1).unwrap(), 400).unwrap();
    let twisted = lseries::curve_coefficients(&CurveSpec::new(Family::Four, -1).unwrap(), 400).unwrap();
    let via = lseries::twist_series(&base, &DirichletCharacter::kronecker(2));
    for n in (1..=400).filter(|n| n % 2 == 1) {
        assert_eq!(via.get(n), twisted.get(n), "n = {n}");
    }
}

#[test]
fn cache_round_trip_and_reuse() {
    let dir = tempfile::tempdir().unwrap();
    let key = cache::CacheKey { family: Family::Six, twist: 2, power: 3 };
    let compute = |b| lseries::nfold_coefficients(Family::Six, 3, &[(2, 1)], b);
    let cold = cache::get_or_compute(dir.path(), &key, 300, compute).unwrap();
    let warm = cache::get_or_compute(dir.path(), &key, 200, |_| panic!("cache miss")).unwrap();
    assert_eq!(warm.coefficients[..=200], cold.coefficients[..=200]);
    assert!(cache::load(dir.path(), &key, 1000).unwrap().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplicative(m in 1usize..60, n in 1usize..60, fam in prop::sample::select(vec![3u32, 4, 6, 7])) {
        prop_assume!(cyarith::arith::gcd_u64(m as u64, n as u64) == 1);
        let f = Family::from_order(fam).unwrap();
        let c = if f == Family::Seven { CurveSpec::roan() } else { CurveSpec::new(f, 1).unwrap() };
        let chi = hecke_character_of(&c).unwrap().power(3).unwrap();
        let t = lseries::hecke_qexpansion(&chi, 3600).unwrap();
        prop_assert_eq!(t.get(m * n), t.get(m) * t.get(n));
    }

    #[test]
    fn power_trace_recursion(a in -60i128..60, n in 2u32..12) {
        let p = 997u64;
        let pi = p as i128;
        let lhs = lseries::power_trace(a, p, n + 1);
        let rhs = a * lseries::power_trace(a, p, n) - pi * lseries::power_trace(a, p, n - 1);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(lseries::power_trace(a, p, 3), lseries::cube_trace(a, p));
    }
}
