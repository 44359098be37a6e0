//! Random test data: polynomials, points, forms and multivector fields.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::calculus::{AltTable, ExteriorForm, LeafwiseForm, MultivectorField};
use crate::kernel::{Expr, Point};
use crate::manifold::Chart;

/// A nonzero integer in `-k..=k`.
pub fn nonzero_int<R: Rng + ?Sized>(rng: &mut R, k: i64) -> i64 {
    let v = rng.gen_range(1..=k);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// A random rational `p/q` with `|p/q| ≤ 3` and `q ≤ 8`.
pub fn rational_value<R: Rng + ?Sized>(rng: &mut R) -> (i64, i64) {
    let q = rng.gen_range(1..=8);
    (rng.gen_range(-3 * q..=3 * q), q)
}

pub fn random_point<R: Rng + ?Sized>(rng: &mut R, names: &[&str]) -> Point {
    names
        .iter()
        .map(|n| {
            let (p, q) = rational_value(rng);
            ((*n).into(), p as f64 / q as f64)
        })
        .collect()
}

/// All monomials in `vars` of total degree at most `max_degree`.
pub fn monomials(vars: &[&str], max_degree: usize) -> Vec<Expr> {
    fn go(vars: &[&str], budget: usize, acc: Expr, out: &mut Vec<Expr>) {
        match vars.split_first() {
            None => out.push(acc),
            Some((x, rest)) => {
                let mut m = acc;
                for k in 0..=budget {
                    go(rest, budget - k, m.clone(), out);
                    m = &m * &Expr::sym(x);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(vars, max_degree, Expr::one(), &mut out);
    out
}

/// A sum of up to `terms` monomials of degree at most `max_degree` with
/// small integer coefficients. Terms may cancel.
pub fn random_polynomial<R: Rng + ?Sized>(
    rng: &mut R,
    vars: &[&str],
    max_degree: usize,
    terms: usize,
) -> Expr {
    let mut acc = Expr::zero();
    let n = rng.gen_range(1..=terms.max(1));
    for _ in 0..n {
        let mut m = Expr::int(nonzero_int(rng, 3));
        let deg = rng.gen_range(0..=max_degree);
        for _ in 0..deg {
            if let Some(x) = vars.choose(rng) {
                m = &m * &Expr::sym(x);
            }
        }
        acc = &acc + &m;
    }
    acc
}

fn chart_names(chart: &Chart) -> Vec<&str> {
    (0..chart.dim()).map(|a| chart.name(a)).collect()
}

fn random_table<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    degree: usize,
    vars: &[&str],
    max_degree: usize,
) -> AltTable<Expr> {
    let mut t = AltTable::zero(n, degree);
    if degree > n {
        return t;
    }
    let slots: Vec<usize> = (0..n).collect();
    let comps = rng.gen_range(1..=3);
    for _ in 0..comps {
        let mut idx: Vec<usize> = slots.choose_multiple(rng, degree).copied().collect();
        idx.sort_unstable();
        let c = random_polynomial(rng, vars, max_degree, 3);
        t.add_at(&idx, &c);
    }
    t
}

pub fn random_exterior_form<R: Rng + ?Sized>(
    rng: &mut R,
    chart: &Chart,
    degree: usize,
    max_degree: usize,
) -> ExteriorForm {
    let vars = chart_names(chart);
    let t = random_table(rng, chart.dim(), degree, &vars, max_degree);
    ExteriorForm::from_table(chart, t).expect("sized for the chart")
}

pub fn random_leafwise_form<R: Rng + ?Sized>(
    rng: &mut R,
    chart: &Chart,
    degree: usize,
    max_degree: usize,
) -> LeafwiseForm {
    let vars = chart_names(chart);
    let t = random_table(rng, chart.leaf_dim(), degree, &vars, max_degree);
    LeafwiseForm::from_table(chart, t).expect("sized for the chart")
}

pub fn random_multivector<R: Rng + ?Sized>(
    rng: &mut R,
    chart: &Chart,
    degree: usize,
    max_degree: usize,
) -> MultivectorField {
    let vars = chart_names(chart);
    let t = random_table(rng, chart.dim(), degree, &vars, max_degree);
    MultivectorField::from_table(chart, t).expect("sized for the chart")
}
