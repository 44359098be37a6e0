//! Connections on the trivial complex line bundle: leafwise connections,
//! curvature, the prequantization condition, lifts to full connections,
//! Hermitian reduction and the Chern form.

use crate::calculus::{AltTable, ExteriorForm, LeafwiseForm, MultivectorField};
use crate::error::{Error, Result};
use crate::kernel::{CExpr, Expr, ZeroTest};
use crate::manifold::{Chart, LeafSlice, Splitting};

/// `R_{ab} = ∂_a A_b − ∂_b A_a` over the coordinates named by `names`.
fn curvature_table(potentials: &[CExpr], names: &[&str]) -> AltTable<CExpr> {
    let n = potentials.len();
    let mut t = AltTable::zero(n, 2);
    for a in 0..n {
        for b in a + 1..n {
            let r = &potentials[b].diff(names[a]) - &potentials[a].diff(names[b]);
            t.set(&[a, b], r);
        }
    }
    t
}

/// A leafwise connection `∇^F s = d̃s − A_i s d̃z^i` in the fixed
/// trivialization, given by its potentials `A_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafwiseConnection {
    chart: Chart,
    potentials: Vec<CExpr>,
}

impl LeafwiseConnection {
    pub fn new(chart: &Chart, potentials: Vec<CExpr>) -> Result<Self> {
        if potentials.len() != chart.leaf_dim() {
            return Err(Error::Dimension(format!(
                "{} potentials for {} leaf coordinates",
                potentials.len(),
                chart.leaf_dim()
            )));
        }
        Ok(LeafwiseConnection {
            chart: chart.clone(),
            potentials,
        })
    }

    pub fn flat(chart: &Chart) -> Self {
        LeafwiseConnection {
            chart: chart.clone(),
            potentials: vec![CExpr::zero(); chart.leaf_dim()],
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn potentials(&self) -> &[CExpr] {
        &self.potentials
    }

    pub fn potential(&self, i: usize) -> &CExpr {
        &self.potentials[i]
    }

    /// `∇_v s = v^i (∂_i s − A_i s)` for `v` tangent to the foliation.
    pub fn covariant_derivative(&self, v: &MultivectorField, s: &CExpr) -> Result<CExpr> {
        let comps = v.leaf_components()?;
        let mut acc = CExpr::zero();
        for (i, vi) in comps.iter().enumerate() {
            if vi.is_zero_structural() {
                continue;
            }
            let d = &s.diff(self.chart.leaf_name(i)) - &(&self.potentials[i] * s);
            acc = &acc + &d.scale(vi);
        }
        Ok(acc)
    }

    /// The contravariant derivative `∇^w_φ s = ∇_{w♯φ} s` for a bivector
    /// tangent to the foliation, with `w♯(φ)^a = −w^{ab} φ_b`.
    pub fn contravariant_derivative(
        &self,
        w: &MultivectorField,
        phi: &LeafwiseForm,
        s: &CExpr,
    ) -> Result<CExpr> {
        let c = self.chart.codim();
        let n = self.chart.leaf_dim();
        let comps: Vec<Expr> = (0..n)
            .map(|a| {
                (0..n).fold(Expr::zero(), |acc, b| {
                    &acc - &(&w.component(&[c + a, c + b]) * &phi.component(&[b]))
                })
            })
            .collect();
        self.covariant_derivative(&MultivectorField::leaf_vector(&self.chart, comps)?, s)
    }

    /// `R̃ = Σ_{i<j} R_{ij} d̃z^i ∧ d̃z^j` with `R_{ij} = ∂_i A_j − ∂_j A_i`.
    pub fn curvature(&self) -> LeafwiseForm<CExpr> {
        let names: Vec<&str> = self.chart.leaf().iter().map(|s| &**s).collect();
        LeafwiseForm::from_table(&self.chart, curvature_table(&self.potentials, &names))
            .expect("leaf-sized table")
    }

    /// `R̃ − iεΩ`; zero exactly when the prequantization condition holds.
    pub fn prequantization_defect(&self, omega: &LeafwiseForm, epsilon: &Expr) -> LeafwiseForm<CExpr> {
        let mut t = AltTable::zero(omega.table().n(), 2);
        for (k, v) in omega.table().iter() {
            t.set(k, CExpr::imag(v * epsilon));
        }
        let target = LeafwiseForm::from_table(&self.chart, t).expect("leaf-sized table");
        self.curvature().sub(&target)
    }

    /// Whether `R̃ = iεΩ`.
    pub fn check_prequantization(&self, omega: &LeafwiseForm, epsilon: &Expr, zt: &ZeroTest) -> Result<bool> {
        self.prequantization_defect(omega, epsilon).is_zero(zt)
    }

    /// The connection with potentials `A_i + ∂_i χ`.
    pub fn gauge_shift(&self, chi: &CExpr) -> Self {
        let potentials = self
            .potentials
            .iter()
            .enumerate()
            .map(|(i, a)| a + &chi.diff(self.chart.leaf_name(i)))
            .collect();
        LeafwiseConnection {
            chart: self.chart.clone(),
            potentials,
        }
    }

    /// `(∇_{[τ,τ']} − [∇_τ, ∇_τ']) s` for fields tangent to the foliation.
    pub fn curvature_endomorphism(
        &self,
        tau: &MultivectorField,
        tau2: &MultivectorField,
        s: &CExpr,
    ) -> Result<CExpr> {
        let lie = tau.bracket(tau2);
        let a = self.covariant_derivative(&lie, s)?;
        let b = self.covariant_derivative(tau, &self.covariant_derivative(tau2, s)?)?;
        let c = self.covariant_derivative(tau2, &self.covariant_derivative(tau, s)?)?;
        Ok(&(&a - &b) + &c)
    }

    /// Potentials restricted to a leaf: a connection on the leaf chart.
    pub fn restrict_to_leaf(&self, slice: &LeafSlice) -> Result<LeafwiseConnection> {
        assert_eq!(&self.chart, slice.chart(), "slice of a different chart");
        let potentials = self
            .potentials
            .iter()
            .map(|a| slice.restrict(a))
            .collect::<Result<Vec<_>>>()?;
        LeafwiseConnection::new(&self.chart.leaf_chart(), potentials)
    }

    pub fn is_unitary(&self) -> bool {
        self.potentials.iter().all(CExpr::is_imaginary)
    }
}

/// A connection `Γ = dz^λ ⊗ (∂_λ + Γ_λ c ∂_c) + dz^i ⊗ (∂_i + Γ_i c ∂_c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    chart: Chart,
    transverse: Vec<CExpr>,
    leaf: Vec<CExpr>,
    hermitian_gauge: bool,
}

impl Connection {
    pub fn new(chart: &Chart, transverse: Vec<CExpr>, leaf: Vec<CExpr>) -> Result<Self> {
        if transverse.len() != chart.codim() || leaf.len() != chart.leaf_dim() {
            return Err(Error::Dimension("connection potentials do not match the chart".into()));
        }
        Ok(Connection {
            chart: chart.clone(),
            transverse,
            leaf,
            hermitian_gauge: false,
        })
    }

    pub fn zero(chart: &Chart) -> Self {
        Connection {
            chart: chart.clone(),
            transverse: vec![CExpr::zero(); chart.codim()],
            leaf: vec![CExpr::zero(); chart.leaf_dim()],
            hermitian_gauge: false,
        }
    }

    /// Marks the trivialization as adapted to `g(c, c') = c c̄'`.
    pub fn in_hermitian_gauge(mut self, flag: bool) -> Self {
        self.hermitian_gauge = flag;
        self
    }

    pub fn hermitian_gauge(&self) -> bool {
        self.hermitian_gauge
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn transverse_potentials(&self) -> &[CExpr] {
        &self.transverse
    }

    pub fn leaf_potentials(&self) -> &[CExpr] {
        &self.leaf
    }

    /// All potentials in global index order.
    pub fn potentials(&self) -> Vec<CExpr> {
        self.transverse.iter().chain(&self.leaf).cloned().collect()
    }

    /// `R = Σ_{a<b} R_{ab} dz^a ∧ dz^b` over all coordinates.
    pub fn curvature(&self) -> ExteriorForm<CExpr> {
        let names: Vec<&str> = (0..self.chart.dim()).map(|a| self.chart.name(a)).collect();
        ExteriorForm::from_table(&self.chart, curvature_table(&self.potentials(), &names))
            .expect("chart-sized table")
    }

    /// The induced leafwise connection, `A_i = Γ_i`.
    pub fn restrict(&self) -> LeafwiseConnection {
        LeafwiseConnection {
            chart: self.chart.clone(),
            potentials: self.leaf.clone(),
        }
    }

    /// Potentials `i·Im(Γ)`: the part preserving the Hermitian form.
    pub fn unitary_reduction(&self) -> Result<Connection> {
        if !self.hermitian_gauge {
            return Err(Error::NotHermitianGauge);
        }
        let imag = |v: &Vec<CExpr>| v.iter().map(|g| CExpr::imag(g.im.clone())).collect();
        Ok(Connection {
            chart: self.chart.clone(),
            transverse: imag(&self.transverse),
            leaf: imag(&self.leaf),
            hermitian_gauge: true,
        })
    }

    pub fn is_unitary(&self) -> bool {
        self.transverse.iter().chain(&self.leaf).all(CExpr::is_imaginary)
    }

    /// `c₁ = i (2π)⁻¹ R` for a connection with imaginary potentials.
    pub fn chern_form(&self) -> Result<ExteriorForm<Expr>> {
        if let Some(a) = (0..self.chart.dim()).find(|&a| !self.potentials()[a].is_imaginary()) {
            return Err(Error::NonImaginaryPotential(self.chart.name(a).to_string()));
        }
        let two_pi = &Expr::int(2) * &Expr::pi();
        let k = two_pi.recip().expect("pi is nonzero");
        let r = self.curvature();
        // i · (i r) = −r for the imaginary parts r
        let t = r.table();
        let mut out = AltTable::zero(t.n(), 2);
        for (idx, c) in t.iter() {
            out.set(idx, -(&c.im * &k));
        }
        ExteriorForm::from_table(&self.chart, out)
    }
}

/// The connection `Γ'` with `Γ'_i = A_i` and
/// `Γ'_λ = Γ_λ − B^i_λ (A_i − Γ_i)`; it restricts to `A`.
pub fn lift_leafwise_connection(
    a: &LeafwiseConnection,
    reference: &Connection,
    splitting: &Splitting,
) -> Result<Connection> {
    let chart = reference.chart();
    if a.chart() != chart
        || splitting.codim() != chart.codim()
        || splitting.leaf_dim() != chart.leaf_dim()
    {
        return Err(Error::Dimension("lift data on different charts".into()));
    }
    let transverse = (0..chart.codim())
        .map(|l| {
            let mut g = reference.transverse[l].clone();
            for i in 0..chart.leaf_dim() {
                let b = splitting.get(i, l);
                if !b.is_zero_structural() {
                    let diff = &a.potentials[i] - &reference.leaf[i];
                    g = &g - &diff.scale(&b);
                }
            }
            g
        })
        .collect();
    Ok(Connection {
        chart: chart.clone(),
        transverse,
        leaf: a.potentials.clone(),
        hermitian_gauge: reference.hermitian_gauge,
    })
}
