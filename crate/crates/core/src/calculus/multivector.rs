//! Multivector fields and the Schouten–Nijenhuis bracket.

use std::fmt;

use super::table::AltTable;
use crate::error::{Error, Result};
use crate::kernel::{Expr, ZeroTest};
use crate::manifold::{Chart, LeafSlice};
use crate::scalar::Scalar;

/// Sign `s` in `[P, Q] = s^(p+1) [P, Q]_std`, where `[P, Q]_std` is the
/// bracket written with right superderivatives in the odd generators `ξ_a`
/// (standing for `∂_a`):
///
/// ```text
/// [P, Q]_std = Σ_a (∂P/∂ξ_a) ∂_a Q − (−1)^((p−1)(q−1)) (∂Q/∂ξ_a) ∂_a P
/// ```
///
/// With `s = −1` the bracket acts on functions by `[X, f] = X(f)`, the
/// bivector gives `[w, f] = θ_f` (the Hamiltonian field), and
/// `ŵ = −[w, ·]` intertwines `Ω♯` with `−d̃`. The model loader checks the
/// last property on every model.
pub const SCHOUTEN_SIGN: i32 = -1;

/// An antisymmetric contravariant tensor field
/// `ϑ = Σ_{a1<…<ar} ϑ^{a1…ar} ∂_{a1} ∧ … ∧ ∂_{ar}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultivectorField {
    chart: Chart,
    table: AltTable<Expr>,
}

impl MultivectorField {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        MultivectorField {
            chart: chart.clone(),
            table: AltTable::zero(chart.dim(), degree),
        }
    }

    pub fn function(chart: &Chart, f: Expr) -> Self {
        MultivectorField {
            chart: chart.clone(),
            table: AltTable::scalar(chart.dim(), f),
        }
    }

    /// `∂` along the chart coordinate `name`.
    pub fn coordinate_vector(chart: &Chart, name: &str) -> Result<Self> {
        MultivectorField::from_components(chart, 1, &[(vec![name], Expr::one())])
    }

    /// A vector field from its components in global index order.
    pub fn vector(chart: &Chart, comps: Vec<Expr>) -> Result<Self> {
        if comps.len() != chart.dim() {
            return Err(Error::Dimension(format!(
                "{} components on a {}-dimensional chart",
                comps.len(),
                chart.dim()
            )));
        }
        let mut t = AltTable::zero(chart.dim(), 1);
        for (a, c) in comps.into_iter().enumerate() {
            t.set(&[a], c);
        }
        Ok(MultivectorField {
            chart: chart.clone(),
            table: t,
        })
    }

    /// A vector field tangent to the leaves from its leaf components.
    pub fn leaf_vector(chart: &Chart, comps: Vec<Expr>) -> Result<Self> {
        if comps.len() != chart.leaf_dim() {
            return Err(Error::Dimension("leaf vector length".into()));
        }
        let mut full = vec![Expr::zero(); chart.codim()];
        full.extend(comps);
        MultivectorField::vector(chart, full)
    }

    /// Each pair contributes `coefficient * ∂_{n1} ∧ … ∧ ∂_{nr}`.
    pub fn from_components(chart: &Chart, degree: usize, comps: &[(Vec<&str>, Expr)]) -> Result<Self> {
        let mut t = AltTable::zero(chart.dim(), degree);
        for (names, c) in comps {
            if names.len() != degree {
                return Err(Error::Dimension(format!("{} indices for degree {degree}", names.len())));
            }
            let idx = names
                .iter()
                .map(|n| {
                    chart
                        .global_index(n)
                        .ok_or_else(|| Error::UnknownCoordinate(n.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            t.add_at(&idx, c);
        }
        Ok(MultivectorField {
            chart: chart.clone(),
            table: t,
        })
    }

    pub fn from_table(chart: &Chart, table: AltTable<Expr>) -> Result<Self> {
        if table.n() != chart.dim() {
            return Err(Error::Dimension("table does not match the chart".into()));
        }
        Ok(MultivectorField {
            chart: chart.clone(),
            table,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.table.degree()
    }

    pub fn table(&self) -> &AltTable<Expr> {
        &self.table
    }

    pub fn component(&self, idx: &[usize]) -> Expr {
        self.table.get(idx)
    }

    /// All components of a vector field, in global index order.
    pub fn vector_components(&self) -> Vec<Expr> {
        assert_eq!(self.degree(), 1, "not a vector field");
        (0..self.chart.dim()).map(|a| self.table.get(&[a])).collect()
    }

    /// Leaf components of a vector field tangent to the foliation.
    pub fn leaf_components(&self) -> Result<Vec<Expr>> {
        if self.degree() != 1 {
            return Err(Error::Dimension("not a vector field".into()));
        }
        if !self.is_subordinate_structural() {
            return Err(Error::NotSubordinate);
        }
        let c = self.chart.codim();
        Ok((0..self.chart.leaf_dim())
            .map(|i| self.table.get(&[c + i]))
            .collect())
    }

    fn is_subordinate_structural(&self) -> bool {
        let c = self.chart.codim();
        self.table.iter().all(|(idx, _)| idx.iter().all(|&a| a >= c))
    }

    /// Whether every component carrying a transverse index vanishes.
    pub fn is_subordinate(&self, zt: &ZeroTest) -> Result<bool> {
        let c = self.chart.codim();
        for (idx, v) in self.table.iter() {
            if idx.iter().any(|&a| a < c) && !v.is_zero(zt)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `X(f) = X^a ∂_a f` for a vector field `X`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut acc = Expr::zero();
        for (idx, c) in self.table.iter() {
            acc = &acc + &(c * &f.diff(self.chart.name(idx[0])));
        }
        acc
    }

    /// `∂_a X^a`.
    pub fn divergence(&self) -> Expr {
        assert_eq!(self.degree(), 1, "not a vector field");
        let mut acc = Expr::zero();
        for (idx, c) in self.table.iter() {
            acc = &acc + &c.diff(self.chart.name(idx[0]));
        }
        acc
    }

    fn with(&self, table: AltTable<Expr>) -> Self {
        MultivectorField {
            chart: self.chart.clone(),
            table,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.with(self.table.add(&other.table))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.with(self.table.sub(&other.table))
    }

    pub fn neg(&self) -> Self {
        self.with(self.table.neg())
    }

    pub fn scale(&self, k: &Expr) -> Self {
        self.with(self.table.scale(k))
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        self.with(self.table.map(f))
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.chart, other.chart, "fields on different charts");
        self.with(self.table.wedge(&other.table))
    }

    pub fn bracket(&self, other: &Self) -> Self {
        schouten_bracket(self, other)
    }

    /// Restriction of a field tangent to the foliation to a leaf.
    pub fn restrict_to_leaf(&self, slice: &LeafSlice) -> Result<MultivectorField> {
        if !self.is_subordinate_structural() {
            return Err(Error::NotSubordinate);
        }
        let leaf = self.chart.leaf_chart();
        let c = self.chart.codim();
        let mut t = AltTable::zero(leaf.dim(), self.degree());
        for (idx, v) in self.table.iter() {
            let k: Vec<usize> = idx.iter().map(|a| a - c).collect();
            t.set(&k, slice.restrict(v)?);
        }
        MultivectorField::from_table(&leaf, t)
    }

    pub fn is_zero(&self, zt: &ZeroTest) -> Result<bool> {
        self.table.is_zero(zt)
    }
}

impl fmt::Display for MultivectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.table.is_zero_structural() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in self.table.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let basis: Vec<String> = idx
                .iter()
                .map(|&a| format!("D{}", self.chart.name(a)))
                .collect();
            if basis.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*{}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}

/// Right derivative by `ξ_a` of `Σ P^I ξ_I`.
fn right_derivative(t: &AltTable<Expr>, a: usize) -> AltTable<Expr> {
    let r = t.degree();
    let mut out = AltTable::zero(t.n(), r - 1);
    for (idx, c) in t.iter() {
        if let Some(k) = idx.iter().position(|&x| x == a) {
            let mut rest = idx.clone();
            rest.remove(k);
            let v = if (r - 1 - k) % 2 == 1 { -c } else { c.clone() };
            out.add_at(&rest, &v);
        }
    }
    out
}

fn std_bracket(p: &MultivectorField, q: &MultivectorField) -> AltTable<Expr> {
    let (dp, dq) = (p.degree(), q.degree());
    let n = p.chart.dim();
    let mut out = AltTable::zero(n, (dp + dq).saturating_sub(1));
    if dp + dq == 0 {
        return out;
    }
    let sign_odd = ((dp as i64 - 1) * (dq as i64 - 1)).rem_euclid(2) == 1;
    for a in 0..n {
        let x = p.chart.name(a);
        if dp > 0 {
            let lhs = right_derivative(&p.table, a);
            if !lhs.is_zero_structural() {
                let dq_a = q.table.map(|c| c.diff(x));
                out = out.add(&lhs.wedge(&dq_a));
            }
        }
        if dq > 0 {
            let lhs = right_derivative(&q.table, a);
            if !lhs.is_zero_structural() {
                let dp_a = p.table.map(|c| c.diff(x));
                let term = lhs.wedge(&dp_a);
                out = if sign_odd { out.add(&term) } else { out.sub(&term) };
            }
        }
    }
    out
}

/// The Schouten–Nijenhuis bracket, normalized by [`SCHOUTEN_SIGN`]. It is
/// graded antisymmetric, `[Q, P] = (−1)^(pq) [P, Q]`, and satisfies
/// `[P, [Q, R]] = (−1)^(p+1) [[P, Q], R] + (−1)^((p−1)(q−1)) [Q, [P, R]]`.
pub fn schouten_bracket(p: &MultivectorField, q: &MultivectorField) -> MultivectorField {
    assert_eq!(p.chart, q.chart, "fields on different charts");
    let t = std_bracket(p, q);
    let flip = SCHOUTEN_SIGN < 0 && (p.degree() + 1) % 2 == 1;
    p.with(if flip { t.neg() } else { t })
}

/// `ŵ(ϑ) = −[w, ϑ]` for a bivector `w`.
pub fn contravariant_d(theta: &MultivectorField, w: &MultivectorField) -> MultivectorField {
    schouten_bracket(w, theta).neg()
}
