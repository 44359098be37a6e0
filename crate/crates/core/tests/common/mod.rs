//! Test helpers and independent oracles.
//!
//! The oracles recompute quantities from textbook coordinate formulas on
//! dense index tuples, without going through the library's sparse tables.

#![allow(dead_code)]

use foliaquant_core::manifold::Chart;
use foliaquant_core::{CExpr, Expr, ZeroTest};

pub fn darboux() -> Chart {
    Chart::with_parameters(&["s"], &["q", "p"], &["eps"]).unwrap()
}

pub fn re(chart: &Chart, src: &str) -> Expr {
    chart.parse_real(src).unwrap()
}

pub fn cx(chart: &Chart, src: &str) -> CExpr {
    chart.parse(src).unwrap()
}

pub fn zt() -> ZeroTest {
    ZeroTest::default()
}

pub fn assert_same(a: &Expr, b: &Expr) {
    assert!(zt().equal(a, b).unwrap(), "{a} != {b}");
}

pub fn assert_same_c(a: &CExpr, b: &CExpr) {
    assert!(zt().is_zero_complex(&(a - b)).unwrap(), "{a} != {b}");
}

/// Every ordered tuple of `r` indices below `n`, repeats included.
pub fn all_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// `(dφ)_{a0..ar} = Σ_k (−1)^k ∂_{a_k} φ_{a0..â_k..ar}`.
pub fn d_oracle(names: &[&str], phi: &dyn Fn(&[usize]) -> Expr, idx: &[usize]) -> Expr {
    let mut acc = Expr::zero();
    for k in 0..idx.len() {
        let rest: Vec<usize> = idx.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &a)| a).collect();
        let t = phi(&rest).diff(names[idx[k]]);
        acc = if k % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

/// `(v⌋φ)_J = Σ_a v^a φ_{aJ}`.
pub fn contract_oracle(v: &[Expr], phi: &dyn Fn(&[usize]) -> Expr, idx: &[usize]) -> Expr {
    let mut acc = Expr::zero();
    for (a, va) in v.iter().enumerate() {
        let mut full = vec![a];
        full.extend_from_slice(idx);
        acc = &acc + &(va * &phi(&full));
    }
    acc
}

/// Hamiltonian field on the `(q, p)` leaf of `Ω = g·d̃p∧d̃q`, solved by hand
/// from `θ⌋Ω = −d̃f`: `θ = (∂_p f ∂_q − ∂_q f ∂_p)/g`, as `(θ^q, θ^p)`.
pub fn theta_oracle(f: &Expr, g: &Expr) -> (Expr, Expr) {
    let inv = g.recip().unwrap();
    (&f.diff("p") * &inv, -&(&f.diff("q") * &inv))
}

/// Kostant–Souriau operator with the half-divergence term applied to `ρ`,
/// written out directly on a `(q, p)` leaf.
pub fn ks_oracle(f: &Expr, g: &Expr, aq: &CExpr, ap: &CExpr, eps: &Expr, rho: &CExpr) -> CExpr {
    let (tq, tp) = theta_oracle(f, g);
    let cov_q = &rho.diff("q") - &(aq * rho);
    let cov_p = &rho.diff("p") - &(ap * rho);
    let div = &tq.diff("q") + &tp.diff("p");
    let inner = &(&(&cov_q.scale(&tq) + &cov_p.scale(&tp)) + &CExpr::imag(eps * f).mul_ref(rho))
        + &rho.scale(&(&Expr::rational(1, 2) * &div));
    CExpr::imag(Expr::int(-1)).mul_ref(&inner)
}

trait MulRef {
    fn mul_ref(&self, other: &CExpr) -> CExpr;
}

impl MulRef for CExpr {
    fn mul_ref(&self, other: &CExpr) -> CExpr {
        self * other
    }
}
