//! Polarizations, the quantum algebra, Kostant–Souriau operators with the
//! half-form divergence term, and the identities they satisfy.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::MultivectorField;
use crate::error::{Error, Result};
use crate::kernel::{Bindings, CExpr, Expr, ZeroTest};
use crate::linalg;
use crate::manifold::{Chart, LeafSlice};
use crate::poisson::LeafwiseSymplectic;
use crate::prequant::LeafwiseConnection;
use crate::sampling;

/// `−i·z`.
fn times_minus_i(z: &CExpr) -> CExpr {
    CExpr::new(z.im.clone(), -&z.re)
}

/// A first-order operator `a^i ∂_i + b` on sections, with `i` running over
/// leaf coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderOperator {
    chart: Chart,
    a: Vec<CExpr>,
    b: CExpr,
}

impl FirstOrderOperator {
    pub fn new(chart: &Chart, a: Vec<CExpr>, b: CExpr) -> Result<Self> {
        if a.len() != chart.leaf_dim() {
            return Err(Error::Dimension("one coefficient per leaf coordinate".into()));
        }
        Ok(FirstOrderOperator {
            chart: chart.clone(),
            a,
            b,
        })
    }

    pub fn multiplication(chart: &Chart, b: CExpr) -> Self {
        FirstOrderOperator {
            chart: chart.clone(),
            a: vec![CExpr::zero(); chart.leaf_dim()],
            b,
        }
    }

    /// `L_τ = τ^i ∂_i + ½ ∂_i τ^i` for `τ` tangent to the foliation.
    pub fn lie_derivative(tau: &MultivectorField) -> Result<Self> {
        let chart = tau.chart();
        let comps = tau.leaf_components()?;
        let half = Expr::rational(1, 2);
        let div = comps
            .iter()
            .enumerate()
            .fold(Expr::zero(), |acc, (i, t)| &acc + &t.diff(chart.leaf_name(i)));
        Ok(FirstOrderOperator {
            chart: chart.clone(),
            a: comps.into_iter().map(CExpr::real).collect(),
            b: CExpr::real(&half * &div),
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn a(&self) -> &[CExpr] {
        &self.a
    }

    pub fn b(&self) -> &CExpr {
        &self.b
    }

    pub fn apply(&self, rho: &CExpr) -> CExpr {
        let mut acc = &self.b * rho;
        for (i, ai) in self.a.iter().enumerate() {
            if !ai.is_zero_structural() {
                acc = &acc + &(ai * &rho.diff(self.chart.leaf_name(i)));
            }
        }
        acc
    }

    /// `[F, G]`, again first order:
    /// `a^i = F.a^j ∂_j G.a^i − G.a^j ∂_j F.a^i`,
    /// `b = F.a^i ∂_i G.b − G.a^i ∂_i F.b`.
    pub fn commutator(&self, other: &Self) -> Self {
        assert_eq!(self.chart, other.chart, "operators on different charts");
        let along = |v: &[CExpr], e: &CExpr| {
            v.iter().enumerate().fold(CExpr::zero(), |acc, (j, c)| {
                if c.is_zero_structural() {
                    acc
                } else {
                    &acc + &(c * &e.diff(self.chart.leaf_name(j)))
                }
            })
        };
        let a = (0..self.a.len())
            .map(|i| &along(&self.a, &other.a[i]) - &along(&other.a, &self.a[i]))
            .collect();
        let b = &along(&self.a, &other.b) - &along(&other.a, &self.b);
        FirstOrderOperator {
            chart: self.chart.clone(),
            a,
            b,
        }
    }

    /// The formal adjoint for the pairing `∫ ρ ρ̄' dz`:
    /// `a ↦ −ā`, `b ↦ b̄ − ∂_i ā^i`.
    pub fn formal_adjoint(&self) -> Self {
        let a: Vec<CExpr> = self.a.iter().map(|c| -&c.conj()).collect();
        let div = self
            .a
            .iter()
            .enumerate()
            .fold(CExpr::zero(), |acc, (i, c)| &acc + &c.conj().diff(self.chart.leaf_name(i)));
        FirstOrderOperator {
            chart: self.chart.clone(),
            a,
            b: &self.b.conj() - &div,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        FirstOrderOperator {
            chart: self.chart.clone(),
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            b: &self.b + &other.b,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&CExpr::real(Expr::int(-1))))
    }

    pub fn scale(&self, k: &CExpr) -> Self {
        FirstOrderOperator {
            chart: self.chart.clone(),
            a: self.a.iter().map(|x| x * k).collect(),
            b: &self.b * k,
        }
    }

    /// The first coefficient not confirmed zero, as `(label, value)`.
    pub fn first_nonzero(&self, zt: &ZeroTest) -> Result<Option<(String, CExpr)>> {
        for (i, c) in self.a.iter().enumerate() {
            if !zt.is_zero_complex(c)? {
                return Ok(Some((format!("a^{}", self.chart.leaf_name(i)), c.clone())));
            }
        }
        if !zt.is_zero_complex(&self.b)? {
            return Ok(Some(("b".into(), self.b.clone())));
        }
        Ok(None)
    }

    pub fn is_zero(&self, zt: &ZeroTest) -> Result<bool> {
        Ok(self.first_nonzero(zt)?.is_none())
    }

    pub fn restrict_to_leaf(&self, slice: &LeafSlice) -> Result<Self> {
        Ok(FirstOrderOperator {
            chart: self.chart.leaf_chart(),
            a: self
                .a
                .iter()
                .map(|c| slice.restrict(c))
                .collect::<Result<_>>()?,
            b: slice.restrict(&self.b)?,
        })
    }
}

impl fmt::Display for FirstOrderOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.a.iter().enumerate() {
            if !c.is_zero_structural() {
                parts.push(format!("({c})*D{}", self.chart.leaf_name(i)));
            }
        }
        if !self.b.is_zero_structural() || parts.is_empty() {
            parts.push(format!("({})", self.b));
        }
        f.write_str(&parts.join(" + "))
    }
}

/// An involutive isotropic distribution `T ⊂ TF` given by generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Polarization {
    chart: Chart,
    generators: Vec<MultivectorField>,
}

/// Outcome of [`Polarization::verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationReport {
    /// Pointwise rank at a random rational point.
    pub rank: usize,
    /// Indices of the generators kept after dependency reduction.
    pub basis: Vec<usize>,
    /// `Ok(None)` if involutive, else a witness.
    pub involutive: Result<Option<String>>,
    /// `Ok(None)` if isotropic, else a witness.
    pub isotropic: Result<Option<String>>,
    pub lagrangian: bool,
}

impl Polarization {
    pub fn new(chart: &Chart, generators: Vec<MultivectorField>) -> Result<Self> {
        for g in &generators {
            if g.degree() != 1 {
                return Err(Error::Dimension("polarization generators are vector fields".into()));
            }
            g.leaf_components()?;
        }
        Ok(Polarization {
            chart: chart.clone(),
            generators,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn generators(&self) -> &[MultivectorField] {
        &self.generators
    }

    /// Greedy maximal independent subset of the generators, judged by
    /// numeric rank at a random rational point.
    pub fn basis(&self, zt: &ZeroTest) -> Result<Vec<usize>> {
        let mut names: Vec<&str> = (0..self.chart.dim()).map(|a| self.chart.name(a)).collect();
        names.extend(self.chart.parameters().iter().map(|p| &**p));
        let mut rng = ChaCha8Rng::seed_from_u64(zt.seed ^ 0x9e37_79b9);
        'retry: for _ in 0..zt.max_retries.max(1) {
            let point = sampling::random_point(&mut rng, &names);
            let mut kept: Vec<usize> = Vec::new();
            let mut rows: Vec<Vec<Expr>> = Vec::new();
            for (k, g) in self.generators.iter().enumerate() {
                rows.push(g.leaf_components()?);
                match linalg::numeric_rank(&rows, &point) {
                    None => continue 'retry,
                    Some(r) if r == rows.len() => kept.push(k),
                    Some(_) => {
                        rows.pop();
                    }
                }
            }
            return Ok(kept);
        }
        Err(Error::Inconclusive("rank of the polarization".into()))
    }

    /// `τ_{b1} ∧ … ∧ τ_{bk}` over the given basis.
    pub fn top_wedge(&self, basis: &[usize]) -> MultivectorField {
        basis.iter().fold(
            MultivectorField::function(&self.chart, Expr::one()),
            |acc, &k| acc.wedge(&self.generators[k]),
        )
    }

    /// Whether `x` lies in the pointwise span: `x ∧ τ_{b1} ∧ … ∧ τ_{bk} = 0`.
    pub fn contains(&self, x: &MultivectorField, basis: &[usize], zt: &ZeroTest) -> Result<bool> {
        x.wedge(&self.top_wedge(basis)).is_zero(zt)
    }

    pub fn verify(&self, symplectic: &LeafwiseSymplectic, zt: &ZeroTest) -> Result<PolarizationReport> {
        let basis = self.basis(zt)?;
        let top = self.top_wedge(&basis);
        let involutive = (|| {
            for a in 0..self.generators.len() {
                for b in a + 1..self.generators.len() {
                    let c = self.generators[a].bracket(&self.generators[b]);
                    if !c.wedge(&top).is_zero(zt)? {
                        return Ok(Some(format!("[tau{a}, tau{b}] = {c}")));
                    }
                }
            }
            Ok(None)
        })();
        let isotropic = (|| {
            for a in 0..self.generators.len() {
                for b in a + 1..self.generators.len() {
                    let v = symplectic.evaluate(&self.generators[a], &self.generators[b])?;
                    if !zt.is_zero(&v)? {
                        return Ok(Some(format!("Omega(tau{a}, tau{b}) = {v}")));
                    }
                }
            }
            Ok(None)
        })();
        let rank = basis.len();
        Ok(PolarizationReport {
            rank,
            lagrangian: 2 * rank == self.chart.leaf_dim(),
            basis,
            involutive,
            isotropic,
        })
    }

    pub fn restrict_to_leaf(&self, slice: &LeafSlice) -> Result<Polarization> {
        let generators = self
            .generators
            .iter()
            .map(|g| g.restrict_to_leaf(slice))
            .collect::<Result<Vec<_>>>()?;
        Polarization::new(&self.chart.leaf_chart(), generators)
    }
}

/// The data of leafwise quantization on one chart.
#[derive(Clone, Debug)]
pub struct QuantumModel {
    pub symplectic: LeafwiseSymplectic,
    pub connection: LeafwiseConnection,
    pub polarization: Polarization,
    /// Functions whose Hamiltonian fields realize the polarization.
    pub hamiltonians: Option<Vec<Expr>>,
    pub epsilon: Expr,
    /// A polarized section multiplied by foliated functions of the
    /// Hamiltonians to produce test sections.
    pub reference_section: CExpr,
    pub observables: Vec<(String, Expr)>,
    pub zero_test: ZeroTest,
}

impl QuantumModel {
    pub fn chart(&self) -> &Chart {
        self.symplectic.chart()
    }

    pub fn hamiltonian_field(&self, f: &Expr) -> MultivectorField {
        self.symplectic.hamiltonian_field(f)
    }

    /// Membership in the quantum algebra: `[θ_f, τ] ∈ T` for every generator.
    pub fn in_quantum_algebra(&self, f: &Expr) -> Result<bool> {
        let zt = &self.zero_test;
        let basis = self.polarization.basis(zt)?;
        let theta = self.hamiltonian_field(f);
        for tau in self.polarization.generators() {
            let c = theta.bracket(tau);
            if !c.is_subordinate(zt)? || !self.polarization.contains(&c, &basis, zt)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `f̂ = −i(∇_{θ_f} + iεf + ½ ∂_i θ_f^i)`, i.e.
    /// `a^i = −iθ_f^i` and `b = −i(−A_i θ_f^i + iεf + ½ ∂_i θ_f^i)`.
    pub fn ks_operator(&self, f: &Expr) -> FirstOrderOperator {
        let chart = self.chart();
        let theta = self
            .hamiltonian_field(f)
            .leaf_components()
            .expect("Hamiltonian fields are leafwise");
        let half = Expr::rational(1, 2);
        let mut inner = CExpr::new(
            &half * &self.hamiltonian_field(f).divergence(),
            f * &self.epsilon,
        );
        for (i, t) in theta.iter().enumerate() {
            if !t.is_zero_structural() {
                inner = &inner - &self.connection.potential(i).scale(t);
            }
        }
        FirstOrderOperator {
            chart: chart.clone(),
            a: theta
                .iter()
                .map(|t| CExpr::imag(-t))
                .collect(),
            b: times_minus_i(&inner),
        }
    }

    /// `[f̂, ĝ] + i·{f,g}^`; zero exactly when the Dirac condition holds.
    pub fn dirac_defect(&self, f: &Expr, g: &Expr) -> FirstOrderOperator {
        let lhs = self.ks_operator(f).commutator(&self.ks_operator(g));
        let bracket = self.symplectic.bracket(f, g);
        let rhs = self.ks_operator(&bracket).scale(&CExpr::imag(Expr::int(-1)));
        lhs.sub(&rhs)
    }

    pub fn verify_dirac(&self, f: &Expr, g: &Expr) -> Result<bool> {
        self.dirac_defect(f, g).is_zero(&self.zero_test)
    }

    /// Fields over which polarized sections are tested: the Hamiltonian
    /// realizations when given, else the raw generators.
    pub fn polarizing_fields(&self) -> Vec<MultivectorField> {
        match &self.hamiltonians {
            Some(hs) => hs.iter().map(|h| self.hamiltonian_field(h)).collect(),
            None => self.polarization.generators().to_vec(),
        }
    }

    /// `(∇_ϑ + ½ ∂_i ϑ^i) ρ` for each polarizing field `ϑ`.
    pub fn polarized_residual(&self, rho: &CExpr) -> Result<Vec<CExpr>> {
        let half = Expr::rational(1, 2);
        self.polarizing_fields()
            .iter()
            .map(|v| {
                let cov = self.connection.covariant_derivative(v, rho)?;
                Ok(&cov + &rho.scale(&(&half * &v.divergence())))
            })
            .collect()
    }

    pub fn is_polarized(&self, rho: &CExpr) -> Result<bool> {
        for r in self.polarized_residual(rho)? {
            if !self.zero_test.is_zero_complex(&r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `f̂ρ` is polarized.
    pub fn preserves_polarized(&self, f: &Expr, rho: &CExpr) -> Result<bool> {
        self.is_polarized(&self.ks_operator(f).apply(rho))
    }

    /// Variables of the foliated functions of the Hamiltonians: the
    /// transverse coordinates and one placeholder per Hamiltonian, with the
    /// bindings that replace the placeholders.
    fn module_variables(&self) -> (Vec<String>, Bindings) {
        let chart = self.chart();
        let mut vars: Vec<String> = chart.transverse().iter().map(|s| s.to_string()).collect();
        let mut bindings = Bindings::new();
        for (k, h) in self.hamiltonians.iter().flatten().enumerate() {
            let name = format!("__h{k}");
            bindings.insert(name.as_str().into(), h.clone());
            vars.push(name);
        }
        (vars, bindings)
    }

    /// A random function of the transverse coordinates and Hamiltonians.
    pub fn random_coefficient<R: Rng + ?Sized>(&self, rng: &mut R, max_degree: usize) -> Expr {
        let (vars, bindings) = self.module_variables();
        let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
        sampling::random_polynomial(rng, &refs, max_degree, 3).substitute(&bindings)
    }

    /// A random polarized section `g · ρ₀`, where `g` depends only on the
    /// transverse coordinates and the Hamiltonians, sometimes through an
    /// exponential.
    pub fn random_polarized_section<R: Rng + ?Sized>(&self, rng: &mut R, max_degree: usize) -> CExpr {
        let mut g = self.random_coefficient(rng, max_degree);
        if rng.gen_bool(0.3) {
            g = &g * &self.random_coefficient(rng, 1).exp();
        }
        self.reference_section.scale(&g)
    }

    /// A random element `c₀ + Σ c_j g_j` of the module generated by
    /// `members` over functions of the transverse coordinates and
    /// Hamiltonians.
    pub fn random_member<R: Rng + ?Sized>(&self, rng: &mut R, members: &[Expr], max_degree: usize) -> Expr {
        let mut f = self.random_coefficient(rng, max_degree);
        for g in members {
            if rng.gen_bool(0.7) {
                f = &f + &(&self.random_coefficient(rng, max_degree) * g);
            }
        }
        f
    }

    /// The model induced on a leaf.
    pub fn restrict_to_leaf(&self, slice: &LeafSlice) -> Result<QuantumModel> {
        let zt = &self.zero_test;
        let omega = self.symplectic.omega().restrict_to_leaf(slice)?;
        Ok(QuantumModel {
            symplectic: LeafwiseSymplectic::new(omega, zt)?,
            connection: self.connection.restrict_to_leaf(slice)?,
            polarization: self.polarization.restrict_to_leaf(slice)?,
            hamiltonians: self
                .hamiltonians
                .as_ref()
                .map(|hs| hs.iter().map(|h| slice.restrict(h)).collect::<Result<_>>())
                .transpose()?,
            epsilon: self.epsilon.clone(),
            reference_section: slice.restrict(&self.reference_section)?,
            observables: self
                .observables
                .iter()
                .map(|(n, f)| Ok((n.clone(), slice.restrict(f)?)))
                .collect::<Result<_>>()?,
            zero_test: *zt,
        })
    }

    /// `i*_F(f̂ρ) − (i*_F f)^(i*_F ρ)` computed against an already
    /// restricted model.
    pub fn leaf_commutation_defect(
        &self,
        leaf: &QuantumModel,
        f: &Expr,
        rho: &CExpr,
        slice: &LeafSlice,
    ) -> Result<CExpr> {
        let lhs = slice.restrict(&self.ks_operator(f).apply(rho))?;
        let rhs = leaf
            .ks_operator(&slice.restrict(f)?)
            .apply(&slice.restrict(rho)?);
        Ok(&lhs - &rhs)
    }

    pub fn verify_leaf_commutation(&self, f: &Expr, rho: &CExpr, slice: &LeafSlice) -> Result<bool> {
        let leaf = self.restrict_to_leaf(slice)?;
        let d = self.leaf_commutation_defect(&leaf, f, rho, slice)?;
        self.zero_test.is_zero_complex(&d)
    }
}
