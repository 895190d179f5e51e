use kfv_core::arith::{gcd, jacobian, parse, parse_with, Definitions, Poly, QuadNum, UniPoly, Var};
use kfv_core::belyi::verify_rational_belyi;
use kfv_core::format::read_framework;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const P: &str = "w^8 + (2+8*sqrt(-3))*w^7 + (-233+50*sqrt(-3))/3*w^6 + (-4600/27-376/3*sqrt(-3))*w^5 \
    + (835-890*sqrt(-3))/3*w^4 + (2420+22*sqrt(-3))/3*w^3 + (1043/3+336*sqrt(-3))*w^2 \
    + (-118+158*sqrt(-3))*w + (-28+4*sqrt(-3))";
/// As first printed, with two misprinted coefficients.
const P_PRINTED: &str = "w^8 + (2+8*sqrt(-3))*w^7 + (-233+50*sqrt(-3))/3*w^6 + (-4600-376*sqrt(-3))/3*w^5 \
    + (835-890*sqrt(-3))/3*w^4 + (2420+22*sqrt(-3))/3*w^3 + (1043/3+336*sqrt(-3))*w^2 \
    + (-118+158*sqrt(-3))*w + (-28+41*sqrt(-3))";
const R: &str = "w^5 + (4+16*sqrt(-3))/3*w^4 + (-278+68*sqrt(-3))/9*w^3 + (-140/3-24*sqrt(-3))*w^2 \
    + (35-112*sqrt(-3))/3*w + (68-20*sqrt(-3))/3";

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn qn(a: BigRational) -> QuadNum {
    QuadNum::from_rational(a)
}

fn difference_degree(p: &str) -> Option<u32> {
    let num = parse(&format!("({p})^2")).unwrap();
    let den = parse(&format!("w*({R})^3")).unwrap();
    verify_rational_belyi(&num, &den).unwrap().difference_degree
}

#[test]
fn corrected_square_root_gives_difference_degree_three() {
    assert_eq!(difference_degree(P), Some(3));
}

#[test]
fn printed_square_root_gives_difference_degree_thirteen() {
    assert_eq!(difference_degree(P_PRINTED), Some(13));
}

/// Value and both partial derivatives at `(a, b)`, from the term list alone.
fn eval_with_partials(p: &Poly, xs: &[&str; 2], at: &[QuadNum; 2], disc: i64) -> [QuadNum; 3] {
    let idx: Vec<Option<usize>> = p.vars().iter().map(|v| xs.iter().position(|x| Var::new(x) == *v)).collect();
    let mut out = [QuadNum::zero(), QuadNum::zero(), QuadNum::zero()];
    for (mono, c) in p.terms() {
        let mut e = [0i32; 2];
        for (k, pow) in mono.iter().enumerate() {
            e[idx[k].expect("unexpected variable")] = *pow;
        }
        let pw = |i: usize, k: i32| at[i].pow(k as u32, disc);
        out[0] = out[0].add(&c.mul(&pw(0, e[0]), disc).mul(&pw(1, e[1]), disc));
        for i in 0..2 {
            if e[i] > 0 {
                let mut t = c.scale(&q(e[i] as i64, 1)).mul(&pw(i, e[i] - 1), disc);
                t = t.mul(&pw(1 - i, e[1 - i]), disc);
                out[i + 1] = out[i + 1].add(&t);
            }
        }
    }
    out
}

#[test]
fn candidate_jacobian_is_a_constant_times_the_expected_monomial() {
    let path = format!("{}/../../datasets/first.kfw", env!("CARGO_MANIFEST_DIR"));
    let fw = read_framework(&std::fs::read_to_string(path).unwrap()).unwrap();
    let c = fw.candidate.unwrap();
    let (x1, x2) = (Var::new("x1"), Var::new("x2"));
    let mut degs = [c.y1.degree_in(&x1), c.y1.degree_in(&x2), c.y2.degree_in(&x1), c.y2.degree_in(&x2)];
    degs.sort();
    assert_eq!(degs, [Some(18), Some(27), Some(48), Some(72)]);
    let j = jacobian(&c.y1, &c.y2).unwrap();
    let (coef, powers) = j.as_single_term().expect("single term");
    assert_eq!(powers.get(&x1), Some(&4));
    assert_eq!(powers.get(&x2), Some(&12));
    assert_eq!(coef.value, QuadNum { a: q(-1664, 3), b: q(832, 3) });

    // independent check at a few rational points
    for (a, b) in [(q(1, 2), q(3, 1)), (q(-2, 1), q(1, 3)), (q(5, 7), q(-1, 2))] {
        let at = [qn(a), qn(b)];
        let f = eval_with_partials(&c.y1, &["x1", "x2"], &at, -3);
        let g = eval_with_partials(&c.y2, &["x1", "x2"], &at, -3);
        let det = f[1].mul(&g[2], -3).sub(&f[2].mul(&g[1], -3));
        let jv = eval_with_partials(&j, &["x1", "x2"], &at, -3);
        assert_eq!(det, jv[0]);
    }
}

#[test]
fn cleared_square_root_degree_thirteen_map_has_coprime_factor() {
    let t = Var::new("t");
    let qp = parse("35*t^4 - 182*t^3 + 390*t^2 - 455*t + 455").unwrap();
    let u = UniPoly::from_poly(&qp, &t).unwrap();
    assert_eq!(gcd(&u, &u.derivative()).unwrap().degree(), Some(0));
}

#[test]
fn quadratic_norm_is_multiplicative() {
    let x = QuadNum { a: q(3, 2), b: q(-5, 3) };
    let y = QuadNum { a: q(-7, 1), b: q(2, 9) };
    for d in [-3, 2, 5, -1] {
        assert_eq!(x.mul(&y, d).norm(d), x.norm(d) * y.norm(d));
        assert!(x.mul(&x.inv(d).unwrap(), d).is_one());
    }
}

#[test]
fn definitions_expand_before_use() {
    let mut defs = Definitions::new();
    defs.insert("w".into(), parse("(x1*x2^3 - 1)^3/x2").unwrap());
    let p = parse_with("w^2", &defs).unwrap();
    assert_eq!(p, parse("(x1*x2^3 - 1)^6/x2^2").unwrap());
}

fn small_poly() -> impl Strategy<Value = String> {
    prop::collection::vec((-4i64..=4, 0u32..4, 0u32..4), 1..5).prop_map(|ts| {
        ts.iter().map(|(c, i, j)| format!("({c})*x^{i}*y^{j}")).collect::<Vec<_>>().join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobian_is_antisymmetric(f in small_poly(), g in small_poly()) {
        // the added x and y keep both variables in play
        let fp = parse(&format!("{f} + x")).unwrap();
        let gp = parse(&format!("{g} + y")).unwrap();
        let fg = jacobian(&fp, &gp).unwrap();
        let gf = jacobian(&gp, &fp).unwrap();
        prop_assert!(fg.add(&gf).unwrap().is_zero());
    }

    #[test]
    fn jacobian_chain_rule_for_powers(f in small_poly(), g in small_poly()) {
        let fp = parse(&format!("{f} + x")).unwrap();
        let gp = parse(&format!("{g} + y")).unwrap();
        let lhs = jacobian(&fp.pow(3).unwrap(), &gp).unwrap();
        let rhs = fp.pow(2).unwrap().mul(&jacobian(&fp, &gp).unwrap()).unwrap().scale(&kfv_core::arith::ExactScalar::int(3)).unwrap();
        prop_assert_eq!(lhs.trimmed(), rhs.trimmed());
    }

    #[test]
    fn jacobian_ignores_shears(f in small_poly(), g in small_poly(), c in -3i64..=3) {
        let fp = parse(&format!("{f} + x")).unwrap();
        let gp = parse(&format!("{g} + y")).unwrap();
        let sheared = gp.add(&fp.scale(&kfv_core::arith::ExactScalar::int(c)).unwrap()).unwrap();
        prop_assert_eq!(jacobian(&fp, &sheared).unwrap().trimmed(), jacobian(&fp, &gp).unwrap().trimmed());
    }
}
