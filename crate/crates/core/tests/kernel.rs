mod common;

use common::{assert_same, darboux, re};
use foliaquant_core::kernel::poly::{Atom, Poly};
use foliaquant_core::kernel::{Bindings, Point};
use num_rational::BigRational;
use foliaquant_core::{Error, Expr, ZeroTest};
use proptest::prelude::*;

#[test]
fn derivative_examples() {
    let c = darboux();
    assert_same(&re(&c, "q^2*p").diff("q"), &re(&c, "2*q*p"));
    assert!(re(&c, "s").diff("q").is_zero_structural());
    assert_same(&re(&c, "sin(q)*exp(s)").diff("q"), &re(&c, "cos(q)*exp(s)"));
}

#[test]
fn zero_test_examples() {
    let c = darboux();
    let zt = ZeroTest::default();
    assert!(zt.is_zero(&re(&c, "q*p - p*q")).unwrap());
    assert!(zt.is_zero(&re(&c, "sin(q)^2 + cos(q)^2 - 1")).unwrap());
    assert!(!zt.is_zero(&re(&c, "q - p")).unwrap());
}

#[test]
fn trig_identity_agrees_with_numeric_oracle() {
    // evaluation at 16 rational points, independent of the kernel's rewriting
    let c = darboux();
    let e = re(&c, "sin(q)^2 + cos(q)^2 - 1");
    for k in 1..=16 {
        let x = k as f64 / 7.0 - 1.0;
        let v = x.sin().powi(2) + x.cos().powi(2) - 1.0;
        let mut pt = Point::new();
        pt.insert("q".into(), x);
        assert!(v.abs() < 1e-12);
        assert!(e.eval_f64(&pt).unwrap().abs() < 1e-12);
    }
}

#[test]
fn substitution_examples() {
    let c = darboux();
    let bind = |pairs: &[(&str, i64)]| -> Bindings {
        pairs.iter().map(|(k, v)| ((*k).into(), Expr::int(*v))).collect()
    };
    assert_eq!(re(&c, "s*q").substitute(&bind(&[("s", 2)])), re(&c, "2*q"));
    assert_eq!(re(&c, "q").substitute(&bind(&[("p", 0)])), re(&c, "q"));
    assert_eq!(re(&c, "s^2 + p").substitute(&bind(&[("s", 0), ("p", 1)])), Expr::one());
}

#[test]
fn parse_errors_carry_columns() {
    let c = darboux();
    match c.parse_real("q + * p") {
        Err(Error::Parse { column, .. }) => assert_eq!(column, 5), // 1-based, at `*`
        other => panic!("unexpected {other:?}"),
    }
    match c.parse_real("q + r") {
        Err(Error::Parse { column, message }) => {
            assert_eq!(column, 5);
            assert!(message.contains("`r`"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

fn leaf(e: &str) -> Expr {
    darboux().parse_real(e).unwrap()
}

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        (-4i64..=4).prop_map(|n| format!("({n})")),
        Just("q".to_string()),
        Just("p".to_string()),
        Just("s".to_string()),
        Just("(1/3)".to_string()),
    ]
}

fn expr_src() -> impl Strategy<Value = String> {
    atom().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            inner.clone().prop_map(|a| format!("({a})^2")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("exp({a})")),
            inner.prop_map(|a| format!("({a})/(q^2 + 1)")),
        ]
    })
}

fn point(q: f64, p: f64, s: f64) -> Point {
    [("q", q), ("p", p), ("s", s)].into_iter().map(|(k, v)| (k.into(), v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_parse_round_trip(src in expr_src()) {
        let e = leaf(&src);
        let printed = e.to_string();
        let back = leaf(&printed);
        prop_assert!(ZeroTest::default().equal(&e, &back).unwrap(), "{} vs {}", e, back);
        // printing a canonical form is stable
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn mixed_partials_commute(src in expr_src()) {
        let e = leaf(&src);
        let a = e.diff("q").diff("p");
        let b = e.diff("p").diff("q");
        prop_assert!(ZeroTest::default().equal(&a, &b).unwrap());
    }

    #[test]
    fn derivative_matches_central_difference(src in expr_src(), q in -1.0f64..1.0, p in -1.0f64..1.0) {
        let e = leaf(&src);
        let h = 1e-5;
        let (Some(up), Some(down), Some(exact)) = (
            e.eval_f64(&point(q + h, p, 0.5)),
            e.eval_f64(&point(q - h, p, 0.5)),
            e.diff("q").eval_f64(&point(q, p, 0.5)),
        ) else {
            return Ok(());
        };
        let fd = (up - down) / (2.0 * h);
        prop_assume!(fd.is_finite() && exact.abs() < 1e6);
        prop_assert!((fd - exact).abs() <= 1e-4 * (1.0 + exact.abs()), "{} vs {} for {}", fd, exact, e);
    }

    #[test]
    fn zero_test_respects_ring_laws(a in expr_src(), b in expr_src(), c in expr_src()) {
        let (a, b, c) = (leaf(&a), leaf(&b), leaf(&c));
        let zt = ZeroTest::default();
        let lhs = &a * &(&b + &c);
        let rhs = &(&a * &b) + &(&a * &c);
        prop_assert!(zt.equal(&lhs, &rhs).unwrap());
        prop_assert!(zt.is_zero(&(&(&a - &b) + &(&b - &a))).unwrap());
    }

    #[test]
    fn derivative_is_a_derivation(a in expr_src(), b in expr_src()) {
        let (a, b) = (leaf(&a), leaf(&b));
        let lhs = (&a * &b).diff("p");
        let rhs = &(&a.diff("p") * &b) + &(&a * &b.diff("p"));
        prop_assert!(ZeroTest::default().equal(&lhs, &rhs).unwrap());
    }
}

fn sparse_poly() -> impl Strategy<Value = Poly> {
    let term = (-3i64..=3, 0u32..3, 0u32..3, 0u32..3);
    prop::collection::vec(term, 1..5).prop_map(|terms| {
        let sym = |n: &str| Poly::atom(Atom::Sym(n.into()));
        terms.into_iter().fold(Poly::zero(), |acc, (k, es, eq, ep)| {
            let m = sym("s").pow(es).mul(&sym("q").pow(eq)).mul(&sym("p").pow(ep));
            acc.add(&m.scale(&BigRational::from_integer(k.into())))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gcd_divides_and_contains_the_planted_factor(a in sparse_poly(), b in sparse_poly(), c in sparse_poly()) {
        prop_assume!(!c.is_zero() && !a.is_zero() && !b.is_zero());
        let (ac, bc) = (a.mul(&c), b.mul(&c));
        let g = Poly::gcd(&ac, &bc);
        prop_assert!(ac.exact_div(&g).is_some(), "{} does not divide {}", g, ac);
        prop_assert!(bc.exact_div(&g).is_some(), "{} does not divide {}", g, bc);
        prop_assert!(g.exact_div(&c).is_some(), "{} misses the factor {}", g, c);
    }
}
