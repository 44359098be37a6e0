mod common;

use std::collections::BTreeMap;

use common::{assert_same_c, cx, darboux, re, zt};
use foliaquant_core::calculus::{ExteriorForm, LeafwiseForm, MultivectorField};
use foliaquant_core::manifold::{LeafSlice, Splitting};
use foliaquant_core::prequant::{lift_leafwise_connection, Connection, LeafwiseConnection};
use foliaquant_core::{sampling, CExpr, Error, Expr};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn standard() -> LeafwiseConnection {
    let c = darboux();
    LeafwiseConnection::new(&c, vec![cx(&c, "i*eps*p"), CExpr::zero()]).unwrap()
}

fn omega(g: &str) -> LeafwiseForm {
    let c = darboux();
    LeafwiseForm::from_components(&c, 2, &[(vec!["p", "q"], re(&c, g))]).unwrap()
}

#[test]
fn covariant_derivative_examples() {
    let c = darboux();
    let a = standard();
    let s = cx(&c, "exp(q)*p + i*s");
    let dp = MultivectorField::coordinate_vector(&c, "p").unwrap();
    let dq = MultivectorField::coordinate_vector(&c, "q").unwrap();
    assert_same_c(&a.covariant_derivative(&dp, &s).unwrap(), &s.diff("p"));
    let expected = &s.diff("q") - &(&cx(&c, "i*eps*p") * &s);
    assert_same_c(&a.covariant_derivative(&dq, &s).unwrap(), &expected);
    let transverse = MultivectorField::coordinate_vector(&c, "s").unwrap();
    assert_eq!(a.covariant_derivative(&transverse, &s), Err(Error::NotSubordinate));
}

#[test]
fn leibniz_rule() {
    let c = darboux();
    let a = LeafwiseConnection::new(&c, vec![cx(&c, "q + i*p^2"), cx(&c, "s*q")]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let f = sampling::random_polynomial(&mut rng, &["s", "q", "p"], 2, 3);
        let s = CExpr::new(
            sampling::random_polynomial(&mut rng, &["s", "q", "p"], 2, 3),
            sampling::random_polynomial(&mut rng, &["s", "q", "p"], 2, 3),
        );
        let comps = (0..2).map(|_| sampling::random_polynomial(&mut rng, &["s", "q", "p"], 2, 3)).collect();
        let v = MultivectorField::leaf_vector(&c, comps).unwrap();
        let lhs = a.covariant_derivative(&v, &(&CExpr::real(f.clone()) * &s)).unwrap();
        let rhs = &s.scale(&v.apply(&f)) + &a.covariant_derivative(&v, &s).unwrap().scale(&f);
        assert_same_c(&lhs, &rhs);
    }
}

#[test]
fn curvature_examples() {
    let c = darboux();
    let r = standard().curvature();
    // R_{pq} = ∂_p A_q − ∂_q A_p = iε, i.e. R̃ = iε d̃p∧d̃q
    assert_eq!(r.component(&[1, 0]), cx(&c, "i*eps"));
    assert_eq!(r.component(&[0, 1]), cx(&c, "-i*eps"));
    assert!(LeafwiseConnection::flat(&c).curvature().is_zero(&zt()).unwrap());
    let exact = LeafwiseConnection::flat(&c).gauge_shift(&cx(&c, "q*p"));
    assert!(exact.curvature().is_zero(&zt()).unwrap());
}

#[test]
fn prequantization_condition() {
    let c = darboux();
    let eps = Expr::sym("eps");
    assert!(standard().check_prequantization(&omega("1"), &eps, &zt()).unwrap());
    assert!(!LeafwiseConnection::flat(&c)
        .check_prequantization(&omega("1"), &eps, &zt())
        .unwrap());
    let scaled = LeafwiseConnection::new(&c, vec![cx(&c, "i*eps*(1 + q^2)*p"), CExpr::zero()]).unwrap();
    assert!(scaled.check_prequantization(&omega("1 + q^2"), &eps, &zt()).unwrap());
}

#[test]
fn restriction_of_full_connections() {
    let c = darboux();
    let g = Connection::new(&c, vec![cx(&c, "s*q + i")], vec![cx(&c, "i*eps*p"), CExpr::zero()]).unwrap();
    assert_eq!(g.restrict(), standard());
    assert_eq!(Connection::zero(&c).restrict(), LeafwiseConnection::flat(&c));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let vars = ["s", "q", "p"];
    for _ in 0..20 {
        let mut pot = || CExpr::new(
            sampling::random_polynomial(&mut rng, &vars, 2, 3),
            sampling::random_polynomial(&mut rng, &vars, 2, 3),
        );
        let g = Connection::new(&c, vec![pot()], vec![pot(), pot()]).unwrap();
        // R = dΓ computed directly, then projected
        let gamma = ExteriorForm::from_components(
            &c,
            1,
            &[(vec!["s"], g.potentials()[0].clone()), (vec!["q"], g.potentials()[1].clone()), (vec!["p"], g.potentials()[2].clone())],
        )
        .unwrap();
        let lhs = gamma.exterior_d().project_leafwise();
        assert!(lhs.sub(&g.restrict().curvature()).is_zero(&zt()).unwrap());
        assert!(g.curvature().sub(&gamma.exterior_d()).is_zero(&zt()).unwrap());
    }
}

#[test]
fn lift_examples() {
    let c = darboux();
    let trivial = Splitting::coordinate(&c);
    let lifted = lift_leafwise_connection(&standard(), &Connection::zero(&c), &trivial).unwrap();
    assert!(lifted.transverse_potentials()[0].is_zero_structural());
    assert_eq!(lifted.leaf_potentials(), standard().potentials());

    let mut b = Splitting::coordinate(&c);
    b.set(0, 0, Expr::one()).unwrap();
    let lifted = lift_leafwise_connection(&standard(), &Connection::zero(&c), &b).unwrap();
    assert_eq!(lifted.transverse_potentials()[0], cx(&c, "-i*eps*p"));
    assert_eq!(lifted.leaf_potentials()[0], cx(&c, "i*eps*p"));
}

#[test]
fn lift_round_trip() {
    let c = darboux();
    let vars = ["s", "q", "p"];
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let mut pot = || CExpr::new(
            sampling::random_polynomial(&mut rng, &vars, 2, 3),
            sampling::random_polynomial(&mut rng, &vars, 2, 3),
        );
        let a = LeafwiseConnection::new(&c, vec![pot(), pot()]).unwrap();
        let reference = Connection::new(&c, vec![pot()], vec![pot(), pot()]).unwrap();
        let mut b = Splitting::coordinate(&c);
        b.set(0, 0, sampling::random_polynomial(&mut rng, &vars, 2, 2)).unwrap();
        b.set(1, 0, sampling::random_polynomial(&mut rng, &vars, 2, 2)).unwrap();
        let lifted = lift_leafwise_connection(&a, &reference, &b).unwrap();
        assert_eq!(lifted.restrict(), a);
    }
}

#[test]
fn unitary_reduction_examples() {
    let c = darboux();
    let g = Connection::new(&c, vec![CExpr::zero()], vec![cx(&c, "3 + i*eps*p"), CExpr::zero()])
        .unwrap()
        .in_hermitian_gauge(true);
    let u = g.unitary_reduction().unwrap();
    assert_eq!(u.leaf_potentials()[0], cx(&c, "i*eps*p"));
    assert!(u.is_unitary());
    assert_eq!(u.unitary_reduction().unwrap(), u);
    let plain = Connection::new(&c, vec![CExpr::zero()], vec![cx(&c, "3"), CExpr::zero()]).unwrap();
    assert_eq!(plain.unitary_reduction(), Err(Error::NotHermitianGauge));

    // the reduced curvature is i·Im of the original, so prequantization survives
    let g = Connection::new(&c, vec![cx(&c, "s^2 + i*q")], vec![cx(&c, "q*p + i*eps*p"), cx(&c, "s")])
        .unwrap()
        .in_hermitian_gauge(true);
    let u = g.unitary_reduction().unwrap();
    let im = g.curvature().map(|x| CExpr::imag(x.im.clone()));
    assert!(u.curvature().sub(&im).is_zero(&zt()).unwrap());
    assert!(u.restrict().check_prequantization(&omega("1"), &Expr::sym("eps"), &zt()).unwrap());
}

#[test]
fn chern_form_examples() {
    let c = darboux();
    let g = Connection::new(&c, vec![CExpr::zero()], vec![cx(&c, "i*eps*p"), CExpr::zero()]).unwrap();
    let c1 = g.chern_form().unwrap();
    // i/(2π) · iε dp∧dq = −ε/(2π) dp∧dq, expanded by hand
    let expected = ExteriorForm::from_components(&c, 2, &[(vec!["p", "q"], re(&c, "-eps/(2*pi)"))]).unwrap();
    assert!(c1.sub(&expected).is_zero(&zt()).unwrap());
    assert!(Connection::zero(&c).chern_form().unwrap().is_zero(&zt()).unwrap());
    let doubled = Connection::new(&c, vec![CExpr::zero()], vec![cx(&c, "2*i*eps*p"), CExpr::zero()]).unwrap();
    assert!(doubled.chern_form().unwrap().sub(&c1.scale(&Expr::int(2))).is_zero(&zt()).unwrap());
    let real = Connection::new(&c, vec![CExpr::zero()], vec![cx(&c, "p"), CExpr::zero()]).unwrap();
    assert!(matches!(real.chern_form(), Err(Error::NonImaginaryPotential(n)) if n == "q"));
}

#[test]
fn leaf_restriction() {
    let c = darboux();
    let sl = LeafSlice::new(&c, BTreeMap::from([("s".to_string(), Expr::one())])).unwrap();
    let a = LeafwiseConnection::new(&c, vec![cx(&c, "i*eps*s*p"), CExpr::zero()]).unwrap();
    let leaf = a.restrict_to_leaf(&sl).unwrap();
    assert_eq!(leaf.potentials()[0], cx(&c.leaf_chart(), "i*eps*p"));
    let om = omega("s").restrict_to_leaf(&sl).unwrap();
    assert!(leaf.check_prequantization(&om, &Expr::sym("eps"), &zt()).unwrap());
    assert!(LeafwiseConnection::flat(&c).restrict_to_leaf(&sl).unwrap().curvature().is_zero(&zt()).unwrap());
}

#[test]
fn curvature_endomorphism_sign() {
    let c = darboux();
    let a = standard();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let vars = ["s", "q", "p"];
    for _ in 0..10 {
        let mut vec = || {
            let comps = (0..2).map(|_| sampling::random_polynomial(&mut rng, &vars, 2, 3)).collect();
            MultivectorField::leaf_vector(&c, comps).unwrap()
        };
        let (u, v) = (vec(), vec());
        let s = CExpr::real(Expr::sym("q")).exp();
        let lhs = a.curvature_endomorphism(&u, &v, &s).unwrap();
        // R(u, v) = iε (u^p v^q − u^q v^p) for R̃ = iε d̃p∧d̃q
        let (uq, up) = (u.component(&[1]), u.component(&[2]));
        let (vq, vp) = (v.component(&[1]), v.component(&[2]));
        let r = CExpr::imag(&Expr::sym("eps") * &(&(&up * &vq) - &(&uq * &vp)));
        assert_same_c(&lhs, &(&r * &s));
    }
}
