mod common;

use std::collections::BTreeMap;

use common::{all_tuples, assert_same, contract_oracle, d_oracle, darboux, re, zt};
use foliaquant_core::calculus::{contravariant_d, schouten_bracket, ExteriorForm, LeafwiseForm, MultivectorField};
use foliaquant_core::manifold::{Chart, LeafSlice};
use foliaquant_core::sampling;
use foliaquant_core::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn slice(chart: &Chart, s: i64) -> LeafSlice {
    LeafSlice::new(chart, BTreeMap::from([("s".to_string(), Expr::int(s))])).unwrap()
}

fn leaf_d(c: &Chart, name: &str) -> LeafwiseForm {
    LeafwiseForm::differential_of(c, name).unwrap()
}

fn full_d(c: &Chart, name: &str) -> ExteriorForm {
    ExteriorForm::differential_of(c, name).unwrap()
}

#[test]
fn foliated_constants_and_restriction() {
    let c = darboux();
    assert!(c.is_foliated_constant(&re(&c, "s^2"), &zt()).unwrap());
    assert!(!c.is_foliated_constant(&re(&c, "s*q"), &zt()).unwrap());
    assert!(c.is_foliated_constant(&re(&c, "5"), &zt()).unwrap());
    let at1 = slice(&c, 1);
    let leaf = c.leaf_chart();
    assert_eq!(at1.restrict(&re(&c, "s*q")).unwrap(), re(&leaf, "q"));
    assert_eq!(slice(&c, 0).restrict(&re(&c, "p + s^2")).unwrap(), re(&leaf, "p"));
    let r = at1.restrict(&re(&c, "s^3 - 2*s")).unwrap();
    assert!(r.as_rational().is_some());
}

#[test]
fn wedge_and_contraction_examples() {
    let c = darboux();
    let (dq, dp) = (leaf_d(&c, "q"), leaf_d(&c, "p"));
    assert!(dq.wedge(&dp).add(&dp.wedge(&dq)).is_zero(&zt()).unwrap());
    assert!(dq.wedge(&dq).is_zero(&zt()).unwrap());
    let f = LeafwiseForm::function(&c, re(&c, "q*s"));
    assert_eq!(f.wedge(&dp), dp.scale(&re(&c, "q*s")));

    let omega = dp.wedge(&dq);
    let dq_v = MultivectorField::coordinate_vector(&c, "q").unwrap();
    let dp_v = MultivectorField::coordinate_vector(&c, "p").unwrap();
    assert_eq!(omega.contract(&dq_v).unwrap(), dp.neg());
    assert_eq!(omega.contract(&dp_v).unwrap(), dq);
}

#[test]
fn contraction_agrees_with_dense_oracle() {
    let c = darboux();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let r = rng.gen_range(1..=3);
        let phi = sampling::random_exterior_form(&mut rng, &c, r, 2);
        let v = sampling::random_multivector(&mut rng, &c, 1, 2);
        let got = phi.contract(&v).unwrap();
        // applying twice vanishes
        assert!(got.contract(&v).map(|x| x.is_zero(&zt()).unwrap()).unwrap_or(true));
        let comp = |i: &[usize]| phi.component(i);
        for idx in all_tuples(c.dim(), r - 1) {
            assert_same(&got.component(&idx), &contract_oracle(&v.vector_components(), &comp, &idx));
        }
    }
}

#[test]
fn exterior_derivative_examples() {
    let c = darboux();
    let f = ExteriorForm::function(&c, re(&c, "s*q"));
    let expected = full_d(&c, "s").scale(&re(&c, "q")).add(&full_d(&c, "q").scale(&re(&c, "s")));
    assert!(f.exterior_d().sub(&expected).is_zero(&zt()).unwrap());
    assert!(full_d(&c, "s").exterior_d().is_zero(&zt()).unwrap());
    let pdq = full_d(&c, "q").scale(&re(&c, "p"));
    assert_eq!(pdq.exterior_d(), full_d(&c, "p").wedge(&full_d(&c, "q")));
}

#[test]
fn leafwise_derivative_examples() {
    let c = darboux();
    let qp = LeafwiseForm::function(&c, re(&c, "q*p"));
    let expected = leaf_d(&c, "q").scale(&re(&c, "p")).add(&leaf_d(&c, "p").scale(&re(&c, "q")));
    assert!(qp.leafwise_d().sub(&expected).is_zero(&zt()).unwrap());
    assert!(LeafwiseForm::function(&c, re(&c, "s")).leafwise_d().is_zero(&zt()).unwrap());
    let sq = LeafwiseForm::function(&c, re(&c, "s*q")).leafwise_d();
    assert_eq!(sq, leaf_d(&c, "q").scale(&re(&c, "s")));
}

#[test]
fn exterior_derivative_agrees_with_dense_oracle() {
    let c = Chart::new(&["s1", "s2"], &["x", "y", "z"]).unwrap();
    let names: Vec<&str> = (0..c.dim()).map(|a| c.name(a)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let r = rng.gen_range(0..=3);
        let phi = sampling::random_exterior_form(&mut rng, &c, r, 3);
        let d = phi.exterior_d();
        let comp = |i: &[usize]| phi.component(i);
        for idx in all_tuples(c.dim(), r + 1) {
            assert_same(&d.component(&idx), &d_oracle(&names, &comp, &idx));
        }
    }
}

#[test]
fn projection_examples() {
    let c = darboux();
    assert!(full_d(&c, "s").project_leafwise().is_zero(&zt()).unwrap());
    assert_eq!(full_d(&c, "q").project_leafwise(), leaf_d(&c, "q"));
    let f = ExteriorForm::function(&c, re(&c, "s*q"));
    let lhs = f.exterior_d().project_leafwise();
    let rhs = f.project_leafwise().leafwise_d();
    assert_eq!(lhs, leaf_d(&c, "q").scale(&re(&c, "s")));
    assert!(lhs.sub(&rhs).is_zero(&zt()).unwrap());
}

#[test]
fn pullback_examples() {
    let c = darboux();
    let leaf = c.leaf_chart();
    let at2 = slice(&c, 2);
    let phi = leaf_d(&c, "q").scale(&re(&c, "s"));
    let pulled = phi.pullback_to_leaf(&at2).unwrap();
    let dq = ExteriorForm::differential_of(&leaf, "q").unwrap();
    assert_eq!(pulled, dq.scale(&Expr::int(2)));

    let f = LeafwiseForm::function(&c, re(&c, "s*q*p"));
    let at3 = slice(&c, 3);
    let lhs = f.leafwise_d().pullback_to_leaf(&at3).unwrap();
    let rhs = f.pullback_to_leaf(&at3).unwrap().exterior_d();
    assert!(lhs.sub(&rhs).is_zero(&zt()).unwrap());

    let omega = leaf_d(&c, "p").wedge(&leaf_d(&c, "q"));
    let dp = ExteriorForm::differential_of(&leaf, "p").unwrap();
    assert_eq!(omega.pullback_to_leaf(&at2).unwrap(), dp.wedge(&dq));
}

#[test]
fn general_pullback_matches_direct_leaf_route() {
    let c = darboux();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let r = rng.gen_range(0..=2);
        let phi = sampling::random_exterior_form(&mut rng, &c, r, 2);
        let sl = slice(&c, rng.gen_range(-3..=3));
        let direct = phi.pullback_to_leaf(&sl).unwrap();
        let general = phi.pullback(&c.leaf_chart(), &sl.embedding()).unwrap();
        assert!(direct.sub(&general).is_zero(&zt()).unwrap());
    }
}

#[test]
fn schouten_examples() {
    let c = darboux();
    let dq = MultivectorField::coordinate_vector(&c, "q").unwrap();
    let dp = MultivectorField::coordinate_vector(&c, "p").unwrap();
    let f = MultivectorField::function(&c, re(&c, "q^2"));
    let vf = schouten_bracket(&dq, &f);
    assert_eq!(vf.degree(), 0);
    assert_same(&vf.component(&[]), &re(&c, "2*q"));
    let v = sampling::random_multivector(&mut ChaCha8Rng::seed_from_u64(1), &c, 1, 2);
    assert!(schouten_bracket(&v, &v).is_zero(&zt()).unwrap());
    let w = dp.wedge(&dq);
    assert!(schouten_bracket(&w, &w).is_zero(&zt()).unwrap());
}

/// Jacobiator of `{f, g} = w^{ab} ∂_a f ∂_b g` on coordinate functions.
fn jacobiator_vanishes(w: &MultivectorField) -> bool {
    let c = w.chart().clone();
    let n = c.dim();
    let br = |f: &Expr, g: &Expr| {
        let mut acc = Expr::zero();
        for a in 0..n {
            for b in 0..n {
                let wab = w.component(&[a, b]);
                if !wab.is_zero_structural() {
                    acc = &acc + &(&wab * &(&f.diff(c.name(a)) * &g.diff(c.name(b))));
                }
            }
        }
        acc
    };
    let x: Vec<Expr> = (0..n).map(|a| Expr::sym(c.name(a))).collect();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let j3 = &(&br(&x[i], &br(&x[j], &x[k])) + &br(&x[j], &br(&x[k], &x[i])))
                    + &br(&x[k], &br(&x[i], &x[j]));
                if !zt().is_zero(&j3).unwrap() {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn schouten_square_detects_jacobi_failure() {
    let c = Chart::new(&["s"], &["q1", "q2", "p1", "p2"]).unwrap();
    let v = |n: &str| MultivectorField::coordinate_vector(&c, n).unwrap();
    let good = v("q1").wedge(&v("p1")).scale(&re(&c, "p1")).add(&v("q2").wedge(&v("p2")));
    let bad = v("q1").wedge(&v("p1")).scale(&re(&c, "p1")).add(&v("q2").wedge(&v("p2")).scale(&re(&c, "q1")));
    for (w, ok) in [(&good, true), (&bad, false)] {
        assert_eq!(jacobiator_vanishes(w), ok);
        assert_eq!(schouten_bracket(w, w).is_zero(&zt()).unwrap(), ok);
    }
}

#[test]
fn contravariant_differential_examples() {
    let c = darboux();
    let dq = MultivectorField::coordinate_vector(&c, "q").unwrap();
    let dp = MultivectorField::coordinate_vector(&c, "p").unwrap();
    let w = dp.wedge(&dq);
    // on functions ŵ(f) = −Ω♯(d̃f) = −θ_f, and θ_q = −∂_p
    let wq = contravariant_d(&MultivectorField::function(&c, re(&c, "q")), &w);
    assert_eq!(wq, dp);
    assert!(contravariant_d(&MultivectorField::function(&c, Expr::int(7)), &w).is_zero(&zt()).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let f = MultivectorField::function(&c, sampling::random_polynomial(&mut rng, &["s", "q", "p"], 3, 3));
        assert!(contravariant_d(&contravariant_d(&f, &w), &w).is_zero(&zt()).unwrap());
    }
}

#[test]
fn graded_identities_of_the_schouten_bracket() {
    let c = Chart::new(&["s"], &["x", "y", "z"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tested = 0;
    while tested < 40 {
        let (p, q, r) = (rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=3));
        if p + q == 0 || q + r == 0 || p + r == 0 {
            continue;
        }
        tested += 1;
        let a = sampling::random_multivector(&mut rng, &c, p, 2);
        let b = sampling::random_multivector(&mut rng, &c, q, 2);
        let cc = sampling::random_multivector(&mut rng, &c, r, 2);
        let lhs = schouten_bracket(&a, &schouten_bracket(&b, &cc));
        let t1 = schouten_bracket(&schouten_bracket(&a, &b), &cc);
        let t2 = schouten_bracket(&b, &schouten_bracket(&a, &cc));
        let t1 = if (p + 1) % 2 == 0 { t1 } else { t1.neg() };
        let t2 = if ((p as i64 - 1) * (q as i64 - 1)).rem_euclid(2) == 1 { t2.neg() } else { t2 };
        assert!(lhs.sub(&t1.add(&t2)).is_zero(&zt()).unwrap(), "Jacobi, degrees {p} {q} {r}");
        let ab = schouten_bracket(&a, &b);
        let ba = schouten_bracket(&b, &a);
        let ba = if (p * q) % 2 == 1 { ba.neg() } else { ba };
        assert!(ab.sub(&ba).is_zero(&zt()).unwrap(), "antisymmetry, degrees {p} {q}");
    }
}
