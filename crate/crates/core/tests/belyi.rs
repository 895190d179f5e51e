use kfv_core::arith::{parse, UniPoly, Var};
use kfv_core::belyi::{
    check_riemann_hurwitz, check_witness, isotope_profile, realizable_as_permutation_triple, verify_rational_belyi,
    Partition, RamificationProfile, SearchOutcome, DEFAULT_BUDGET,
};

fn profile(s: &str) -> RamificationProfile {
    s.parse().unwrap()
}

fn rational(num: &str, den: &str) -> RamificationProfile {
    verify_rational_belyi(&parse(num).unwrap(), &parse(den).unwrap()).unwrap().profile
}

fn same_fibres(a: &RamificationProfile, b: &RamificationProfile) {
    assert_eq!(a.degree, b.degree);
    assert_eq!(a.fibres(), b.fibres(), "{a} vs {b}");
}

#[test]
fn degree_thirteen_polynomial() {
    let p = rational("t*(35*t^4 - 182*t^3 + 390*t^2 - 455*t + 455)^3", "3^15");
    same_fibres(&p, &profile("deg=13 over0=3^4,1 over1=5,1^8 overInf=13"));
}

#[test]
fn thirteenth_power_plus_one() {
    let p = rational("t^13 + 1", "1");
    same_fibres(&p, &profile("deg=13 over0=1^13 over1=13 overInf=13"));
    same_fibres(&p, &isotope_profile(6).unwrap());
}

#[test]
fn degree_five_map() {
    let p = rational("x^3*(x - 5)^2", "108");
    same_fibres(&p, &profile("deg=5 over0=3,2 over1=2,1^3 overInf=5"));
}

#[test]
fn degree_five_critical_points() {
    let x = Var::new("x");
    let f = UniPoly::from_poly(&parse("x^3*(x - 5)^2").unwrap(), &x).unwrap();
    let expected = UniPoly::from_poly(&parse("5*x^2*(x - 3)*(x - 5)").unwrap(), &x).unwrap();
    assert_eq!(f.derivative(), expected);
    // f(3) = 27 * 4 = 108, so x = 3 is the double point over 1
    let minus_one = parse("x^3*(x - 5)^2 - 108").unwrap();
    let g = UniPoly::from_poly(&minus_one, &x).unwrap();
    let sq = parse("(x - 3)^2").unwrap();
    let (_, r) = g.divrem(&UniPoly::from_poly(&sq, &x).unwrap()).unwrap();
    assert!(r.is_zero());
}

#[test]
fn isotope_profiles() {
    let first_minus_two = profile("deg=13 over0=3^4,1 over1=5,1^8 overInf=13");
    same_fibres(&isotope_profile(2).unwrap(), &first_minus_two);
    same_fibres(&isotope_profile(4).unwrap(), &profile("deg=13 over0=3^2,1^7 over1=9,1^4 overInf=13"));
    for k in 2..=6 {
        assert!(check_riemann_hurwitz(&isotope_profile(k).unwrap()).unwrap(), "k={k}");
    }
    assert!(isotope_profile(1).is_err());
    assert!(isotope_profile(7).is_err());
}

#[test]
fn profile_text_round_trip() {
    let p = profile("deg=16 over0=2^8 over1=13,1^3 overInf=3^5,1");
    assert_eq!(p.over_inf, Partition::new(vec![1, 3, 3, 3, 3, 3]));
    assert_eq!(profile(&p.to_string()), p);
}

fn found(p: &RamificationProfile) -> kfv_core::belyi::Witness {
    match realizable_as_permutation_triple(p, DEFAULT_BUDGET).unwrap() {
        SearchOutcome::Found { witness, .. } => {
            assert!(check_witness(p, &witness));
            assert!(check_riemann_hurwitz(p).unwrap());
            witness
        }
        other => panic!("{p}: {other:?}"),
    }
}

#[test]
fn searches_that_succeed() {
    for s in [
        "deg=5 over0=3,2 over1=2,1^3 overInf=5",
        "deg=13 over0=3^4,1 over1=5,1^8 overInf=13",
        "deg=13 over0=1^13 over1=13 overInf=13",
        "deg=16 over0=2^8 over1=13,1^3 overInf=3^5,1",
    ] {
        let p = profile(s);
        assert_eq!(found(&p), found(&p), "{s}: witness is deterministic");
    }
}

#[test]
fn klein_four_profile_is_not_realizable() {
    let p = profile("deg=4 over0=2,2 over1=2,2 overInf=3,1");
    assert!(matches!(realizable_as_permutation_triple(&p, DEFAULT_BUDGET).unwrap(), SearchOutcome::NotFoundExhausted { .. }));
}

#[test]
fn tiny_budget_is_reported() {
    let p = profile("deg=13 over0=3^4,1 over1=5,1^8 overInf=13");
    assert!(matches!(realizable_as_permutation_triple(&p, 3).unwrap(), SearchOutcome::BudgetExceeded { .. }));
}
