//! Exterior forms on the whole chart and leafwise forms.

use std::fmt;

use super::multivector::MultivectorField;
use super::table::{increasing_tuples, AltTable};
use crate::error::{Error, Result};
use crate::kernel::{Bindings, Expr, ZeroTest};
use crate::linalg;
use crate::manifold::{Chart, CoordClass, LeafSlice};
use crate::scalar::Scalar;

/// `Σ_a dz^a ∧ ∂_a φ`, differentiating by `names[a]`.
fn d_table<S: Scalar>(t: &AltTable<S>, names: &[&str]) -> AltTable<S> {
    let mut out = AltTable::zero(t.n(), t.degree() + 1);
    if t.degree() >= t.n() {
        return out;
    }
    for (idx, c) in t.iter() {
        for (a, x) in names.iter().enumerate() {
            if idx.contains(&a) {
                continue;
            }
            let dc = c.diff(x);
            if dc.is_zero_structural() {
                continue;
            }
            let mut key = Vec::with_capacity(idx.len() + 1);
            key.push(a);
            key.extend_from_slice(idx);
            out.add_at(&key, &dc);
        }
    }
    out
}

/// Interior product with the vector whose components are `v`.
fn interior<S: Scalar>(v: &[Expr], t: &AltTable<S>) -> AltTable<S> {
    let mut out = AltTable::zero(t.n(), t.degree() - 1);
    for (idx, c) in t.iter() {
        for (k, &a) in idx.iter().enumerate() {
            if v[a].is_zero_structural() {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(k);
            let term = c.mul_real(&v[a]);
            let term = if k % 2 == 1 { term.neg() } else { term };
            out.add_at(&rest, &term);
        }
    }
    out
}

fn fmt_table<S: Scalar>(
    f: &mut fmt::Formatter<'_>,
    t: &AltTable<S>,
    name: impl Fn(usize) -> String,
) -> fmt::Result {
    if t.is_zero_structural() {
        return write!(f, "0");
    }
    for (n, (idx, c)) in t.iter().enumerate() {
        if n > 0 {
            write!(f, " + ")?;
        }
        let basis: Vec<String> = idx.iter().map(|&a| format!("d{}", name(a))).collect();
        if basis.is_empty() {
            write!(f, "{c}")?;
        } else {
            write!(f, "({c})*{}", basis.join("^"))?;
        }
    }
    Ok(())
}

fn names_of(chart: &Chart, leaf_only: bool) -> Vec<&str> {
    if leaf_only {
        (0..chart.leaf_dim()).map(|i| chart.leaf_name(i)).collect()
    } else {
        (0..chart.dim()).map(|a| chart.name(a)).collect()
    }
}

/// A differential form over all chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ExteriorForm<S = Expr> {
    chart: Chart,
    table: AltTable<S>,
}

impl<S: Scalar> ExteriorForm<S> {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        ExteriorForm {
            chart: chart.clone(),
            table: AltTable::zero(chart.dim(), degree),
        }
    }

    pub fn function(chart: &Chart, f: S) -> Self {
        ExteriorForm {
            chart: chart.clone(),
            table: AltTable::scalar(chart.dim(), f),
        }
    }

    /// `dz` for the chart coordinate `name`.
    pub fn differential_of(chart: &Chart, name: &str) -> Result<Self> {
        let a = chart
            .global_index(name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        let mut t = AltTable::zero(chart.dim(), 1);
        t.set(&[a], S::one());
        Ok(ExteriorForm {
            chart: chart.clone(),
            table: t,
        })
    }

    /// Builds a form from `(coordinate names, coefficient)` pairs; each pair
    /// contributes `coefficient * dz^{n1} ∧ … ∧ dz^{nr}`.
    pub fn from_components(chart: &Chart, degree: usize, comps: &[(Vec<&str>, S)]) -> Result<Self> {
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
        Ok(ExteriorForm {
            chart: chart.clone(),
            table: t,
        })
    }

    pub fn from_table(chart: &Chart, table: AltTable<S>) -> Result<Self> {
        if table.n() != chart.dim() {
            return Err(Error::Dimension("table does not match the chart".into()));
        }
        Ok(ExteriorForm {
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

    pub fn table(&self) -> &AltTable<S> {
        &self.table
    }

    /// Component at global indices `idx`, in any order.
    pub fn component(&self, idx: &[usize]) -> S {
        self.table.get(idx)
    }

    fn with(&self, table: AltTable<S>) -> Self {
        ExteriorForm {
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

    pub fn scale(&self, s: &S) -> Self {
        self.with(self.table.scale(s))
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        self.with(self.table.map(f))
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.chart, other.chart, "forms on different charts");
        self.with(self.table.wedge(&other.table))
    }

    /// Interior product `v ⌋ self`.
    pub fn contract(&self, v: &MultivectorField) -> Result<Self> {
        if v.degree() != 1 {
            return Err(Error::Dimension("contraction needs a vector field".into()));
        }
        if self.degree() == 0 {
            return Err(Error::ZeroDegree);
        }
        Ok(self.with(interior(&v.vector_components(), &self.table)))
    }

    pub fn exterior_d(&self) -> Self {
        self.with(d_table(&self.table, &names_of(&self.chart, false)))
    }

    /// `i*_F`: drops every component carrying a transverse index.
    pub fn project_leafwise(&self) -> LeafwiseForm<S> {
        let c = self.chart.codim();
        let mut t = AltTable::zero(self.chart.leaf_dim(), self.degree());
        for (idx, v) in self.table.iter() {
            if idx.iter().all(|&a| a >= c) {
                let leaf: Vec<usize> = idx.iter().map(|a| a - c).collect();
                t.set(&leaf, v.clone());
            }
        }
        LeafwiseForm {
            chart: self.chart.clone(),
            table: t,
        }
    }

    /// Pull-back along the map whose `a`-th chart coordinate is
    /// `embedding[a]`, a function of the coordinates of `target`.
    pub fn pullback(&self, target: &Chart, embedding: &[Expr]) -> Result<ExteriorForm<S>> {
        if embedding.len() != self.chart.dim() {
            return Err(Error::Dimension("embedding length".into()));
        }
        let bindings: Bindings = (0..self.chart.dim())
            .map(|a| (self.chart.name(a).into(), embedding[a].clone()))
            .collect();
        let jac: Vec<Vec<Expr>> = embedding
            .iter()
            .map(|z| (0..target.dim()).map(|j| z.diff(target.name(j))).collect())
            .collect();
        let r = self.degree();
        let mut out = AltTable::zero(target.dim(), r);
        for (idx, c) in self.table.iter() {
            let c = c
                .try_substitute(&bindings)
                .ok_or_else(|| Error::InvalidSlice(format!("`{c}` has a pole on the image")))?;
            for cols in increasing_tuples(target.dim(), r) {
                let minor: Vec<Vec<Expr>> = idx
                    .iter()
                    .map(|&a| cols.iter().map(|&j| jac[a][j].clone()).collect())
                    .collect();
                let det = linalg::determinant(&minor);
                if !det.is_zero_structural() {
                    out.add_at(&cols, &c.mul_real(&det));
                }
            }
        }
        ExteriorForm::from_table(target, out)
    }

    /// Pull-back to a leaf computed from the inclusion map itself.
    pub fn pullback_to_leaf(&self, slice: &LeafSlice) -> Result<ExteriorForm<S>> {
        assert_eq!(&self.chart, slice.chart(), "slice of a different chart");
        self.pullback(&self.chart.leaf_chart(), &slice.embedding())
    }

    pub fn is_zero(&self, zt: &ZeroTest) -> Result<bool> {
        self.table.is_zero(zt)
    }
}

impl<S: Scalar> fmt::Display for ExteriorForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_table(f, &self.table, |a| self.chart.name(a).to_string())
    }
}

/// A leafwise form: components indexed by leaf coordinates only, with
/// coefficients depending on all chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafwiseForm<S = Expr> {
    chart: Chart,
    table: AltTable<S>,
}

impl<S: Scalar> LeafwiseForm<S> {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        LeafwiseForm {
            chart: chart.clone(),
            table: AltTable::zero(chart.leaf_dim(), degree),
        }
    }

    pub fn function(chart: &Chart, f: S) -> Self {
        LeafwiseForm {
            chart: chart.clone(),
            table: AltTable::scalar(chart.leaf_dim(), f),
        }
    }

    /// `d̃z` for the leaf coordinate `name`.
    pub fn differential_of(chart: &Chart, name: &str) -> Result<Self> {
        let i = leaf_index(chart, name)?;
        let mut t = AltTable::zero(chart.leaf_dim(), 1);
        t.set(&[i], S::one());
        Ok(LeafwiseForm {
            chart: chart.clone(),
            table: t,
        })
    }

    /// Like [`ExteriorForm::from_components`], over leaf coordinate names.
    pub fn from_components(chart: &Chart, degree: usize, comps: &[(Vec<&str>, S)]) -> Result<Self> {
        if degree > chart.leaf_dim() {
            return Err(Error::Dimension(format!(
                "leafwise degree {degree} exceeds the leaf dimension"
            )));
        }
        let mut t = AltTable::zero(chart.leaf_dim(), degree);
        for (names, c) in comps {
            if names.len() != degree {
                return Err(Error::Dimension(format!("{} indices for degree {degree}", names.len())));
            }
            let idx = names
                .iter()
                .map(|n| leaf_index(chart, n))
                .collect::<Result<Vec<_>>>()?;
            t.add_at(&idx, c);
        }
        Ok(LeafwiseForm {
            chart: chart.clone(),
            table: t,
        })
    }

    pub fn from_table(chart: &Chart, table: AltTable<S>) -> Result<Self> {
        if table.n() != chart.leaf_dim() {
            return Err(Error::Dimension("table does not match the leaf dimension".into()));
        }
        Ok(LeafwiseForm {
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

    pub fn table(&self) -> &AltTable<S> {
        &self.table
    }

    /// Component at leaf indices `idx`, in any order.
    pub fn component(&self, idx: &[usize]) -> S {
        self.table.get(idx)
    }

    fn with(&self, table: AltTable<S>) -> Self {
        LeafwiseForm {
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

    pub fn scale(&self, s: &S) -> Self {
        self.with(self.table.scale(s))
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        self.with(self.table.map(f))
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.chart, other.chart, "forms on different charts");
        self.with(self.table.wedge(&other.table))
    }

    /// Interior product with a vector field tangent to the foliation.
    pub fn contract(&self, v: &MultivectorField) -> Result<Self> {
        if v.degree() != 1 {
            return Err(Error::Dimension("contraction needs a vector field".into()));
        }
        if self.degree() == 0 {
            return Err(Error::ZeroDegree);
        }
        Ok(self.with(interior(&v.leaf_components()?, &self.table)))
    }

    /// Value on the ordered vector fields `vs` (one per degree).
    pub fn evaluate(&self, vs: &[&MultivectorField]) -> Result<S> {
        if vs.len() != self.degree() {
            return Err(Error::Dimension("wrong number of arguments".into()));
        }
        let mut acc = self.clone();
        for v in vs {
            acc = acc.contract(v)?;
        }
        // v_r ⌋ … ⌋ v_1 ⌋ φ = φ(v_1, …, v_r)
        Ok(acc.table.get(&[]))
    }

    /// `d̃`: the exterior derivative along leaf coordinates only.
    pub fn leafwise_d(&self) -> Self {
        self.with(d_table(&self.table, &names_of(&self.chart, true)))
    }

    /// `i*_F`: restricts coefficients to the leaf; `d̃z^i ↦ dz^i`.
    pub fn pullback_to_leaf(&self, slice: &LeafSlice) -> Result<ExteriorForm<S>> {
        assert_eq!(&self.chart, slice.chart(), "slice of a different chart");
        let leaf = self.chart.leaf_chart();
        let t = self.table.try_map(|c| slice.restrict(c))?;
        ExteriorForm::from_table(&leaf, t)
    }

    /// Restriction to a leaf as a leafwise form of the leaf chart.
    pub fn restrict_to_leaf(&self, slice: &LeafSlice) -> Result<LeafwiseForm<S>> {
        let f = self.pullback_to_leaf(slice)?;
        LeafwiseForm::from_table(&f.chart.clone(), f.table)
    }

    pub fn is_zero(&self, zt: &ZeroTest) -> Result<bool> {
        self.table.is_zero(zt)
    }
}

impl<S: Scalar> fmt::Display for LeafwiseForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_table(f, &self.table, |i| format!("~{}", self.chart.leaf_name(i)))
    }
}

fn leaf_index(chart: &Chart, name: &str) -> Result<usize> {
    match chart.coordinate(name) {
        Some(c) if c.class == CoordClass::Leaf => Ok(c.index),
        Some(_) => Err(Error::Invalid(format!(
            "`{name}` is transverse; leafwise forms have leaf indices only"
        ))),
        None => Err(Error::UnknownCoordinate(name.to_string())),
    }
}
