//! Leafwise symplectic forms, Poisson bivectors and the correspondence
//! between them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{contravariant_d, schouten_bracket, AltTable, LeafwiseForm, MultivectorField};
use crate::error::{Error, Result};
use crate::kernel::{Expr, ZeroTest};
use crate::linalg::{self, Matrix};
use crate::manifold::Chart;
use crate::report::CheckResult;
use crate::sampling;

/// A `d̃`-closed nondegenerate leafwise two-form `Ω`.
///
/// `matrix()[i][j] = Ω(∂_i, ∂_j)` over leaf indices; `inverse()` is its
/// inverse `N`. Then `Ω♭(v) = −v⌋Ω = M v` and `Ω♯(α) = N α`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafwiseSymplectic {
    omega: LeafwiseForm,
    matrix: Matrix,
    inverse: Matrix,
    determinant: Expr,
}

impl LeafwiseSymplectic {
    pub fn new(omega: LeafwiseForm, zt: &ZeroTest) -> Result<Self> {
        let chart = omega.chart().clone();
        let n = chart.leaf_dim();
        if omega.degree() != 2 {
            return Err(Error::Dimension("a symplectic form has degree two".into()));
        }
        if n % 2 != 0 {
            return Err(Error::Degenerate(format!("odd leaf dimension {n}")));
        }
        let closure = omega.leafwise_d();
        if let Some((_, c)) = closure.table().first_nonzero(zt)? {
            return Err(Error::NotClosed(format!("d~Omega has component {c}")));
        }
        let matrix: Matrix = (0..n)
            .map(|i| (0..n).map(|j| omega.component(&[i, j])).collect())
            .collect();
        let determinant = linalg::determinant(&matrix);
        if zt.is_zero(&determinant)? {
            return Err(Error::Degenerate("the component determinant vanishes".into()));
        }
        let inverse = linalg::inverse(&matrix)
            .ok_or_else(|| Error::Degenerate("the component matrix is singular".into()))?;
        Ok(LeafwiseSymplectic {
            omega,
            matrix,
            inverse,
            determinant,
        })
    }

    pub fn chart(&self) -> &Chart {
        self.omega.chart()
    }

    pub fn omega(&self) -> &LeafwiseForm {
        &self.omega
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn determinant(&self) -> &Expr {
        &self.determinant
    }

    /// A note when the determinant is not a nonzero constant, naming the
    /// factor whose zero set the chart must avoid.
    pub fn degeneracy_warning(&self) -> Option<String> {
        if self.determinant.as_rational().is_some() {
            None
        } else {
            Some(format!(
                "nondegenerate only where {} != 0",
                Expr::from_poly(self.determinant.numerator().clone())
            ))
        }
    }

    /// `Ω♭(v) = −v⌋Ω` for `v` tangent to the foliation.
    pub fn flat(&self, v: &MultivectorField) -> Result<LeafwiseForm> {
        Ok(self.omega.contract(v)?.neg())
    }

    /// `Ω♯`, the inverse of [`Self::flat`], on leafwise one-forms.
    pub fn sharp(&self, alpha: &LeafwiseForm) -> Result<MultivectorField> {
        if alpha.degree() != 1 {
            return Err(Error::Dimension("sharp of a non-one-form".into()));
        }
        let a: Vec<Expr> = (0..self.leaf_dim()).map(|j| alpha.component(&[j])).collect();
        MultivectorField::leaf_vector(self.chart(), self.apply_inverse(&a))
    }

    /// `Ω♯` extended multiplicatively to leafwise forms of any degree.
    pub fn sharp_form(&self, alpha: &LeafwiseForm) -> Result<MultivectorField> {
        let chart = self.chart();
        let mut out = MultivectorField::zero(chart, alpha.degree());
        for (idx, c) in alpha.table().iter() {
            let mut term = MultivectorField::function(chart, c.clone());
            for &j in idx {
                let d = LeafwiseForm::differential_of(chart, chart.leaf_name(j))?;
                term = term.wedge(&self.sharp(&d)?);
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    fn leaf_dim(&self) -> usize {
        self.matrix.len()
    }

    fn apply_inverse(&self, a: &[Expr]) -> Vec<Expr> {
        self.inverse
            .iter()
            .map(|row| {
                row.iter()
                    .zip(a)
                    .fold(Expr::zero(), |acc, (n, x)| &acc + &(n * x))
            })
            .collect()
    }

    /// `θ_f = Ω♯(d̃f)`, characterized by `θ_f⌋Ω = −d̃f`.
    pub fn hamiltonian_field(&self, f: &Expr) -> MultivectorField {
        let df: Vec<Expr> = self.chart().leaf().iter().map(|x| f.diff(x)).collect();
        MultivectorField::leaf_vector(self.chart(), self.apply_inverse(&df))
            .expect("leaf-sized components")
    }

    /// `{f, g} = θ_f⌋d̃g`.
    pub fn bracket(&self, f: &Expr, g: &Expr) -> Expr {
        self.hamiltonian_field(f).apply(g)
    }

    /// `Ω(u, v)` for fields tangent to the foliation.
    pub fn evaluate(&self, u: &MultivectorField, v: &MultivectorField) -> Result<Expr> {
        self.omega.evaluate(&[u, v])
    }

    /// The Poisson bivector `w(α, β) = Ω(Ω♯α, Ω♯β)`, with components
    /// `w^{kl} = −N^{kl}`.
    pub fn bivector(&self) -> PoissonBivector {
        let chart = self.chart();
        let c = chart.codim();
        let n = self.leaf_dim();
        let mut t = AltTable::zero(chart.dim(), 2);
        for k in 0..n {
            for l in k + 1..n {
                t.set(&[c + k, c + l], -&self.inverse[k][l]);
            }
        }
        PoissonBivector {
            w: MultivectorField::from_table(chart, t).expect("chart-sized"),
        }
    }
}

/// A bivector field, typically Poisson and tangent to the foliation.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonBivector {
    w: MultivectorField,
}

impl PoissonBivector {
    pub fn new(w: MultivectorField) -> Result<Self> {
        if w.degree() != 2 {
            return Err(Error::Dimension("a bivector has degree two".into()));
        }
        Ok(PoissonBivector { w })
    }

    pub fn field(&self) -> &MultivectorField {
        &self.w
    }

    pub fn chart(&self) -> &Chart {
        self.w.chart()
    }

    /// `w(df, dg) = w^{ab} ∂_a f ∂_b g`.
    pub fn bracket(&self, f: &Expr, g: &Expr) -> Expr {
        let chart = self.chart();
        let mut acc = Expr::zero();
        for (idx, c) in self.w.table().iter() {
            let (a, b) = (chart.name(idx[0]), chart.name(idx[1]));
            let t = &(&f.diff(a) * &g.diff(b)) - &(&f.diff(b) * &g.diff(a));
            acc = &acc + &(c * &t);
        }
        acc
    }

    /// `[w, w]`.
    pub fn self_bracket(&self) -> MultivectorField {
        schouten_bracket(&self.w, &self.w)
    }

    /// `ŵ(ϑ) = −[w, ϑ]`.
    pub fn contravariant_d(&self, theta: &MultivectorField) -> MultivectorField {
        contravariant_d(theta, &self.w)
    }

    pub fn is_subordinate(&self, zt: &ZeroTest) -> Result<bool> {
        self.w.is_subordinate(zt)
    }

    /// Leaf block `W[k][l] = w^{kl}`.
    pub fn leaf_matrix(&self) -> Matrix {
        let chart = self.chart();
        let c = chart.codim();
        let n = chart.leaf_dim();
        (0..n)
            .map(|k| (0..n).map(|l| self.w.component(&[c + k, c + l])).collect())
            .collect()
    }

    /// The leafwise form with `Ω(v, v') = w(w♭v, w♭v')`, i.e. components
    /// `−W⁻¹`. Requires `w` tangent to the foliation and of full rank on the
    /// leaves.
    pub fn to_symplectic(&self, zt: &ZeroTest) -> Result<LeafwiseSymplectic> {
        if !self.is_subordinate(zt)? {
            return Err(Error::NotSubordinate);
        }
        let chart = self.chart().clone();
        let n = chart.leaf_dim();
        let wm = self.leaf_matrix();
        let names: Vec<&str> = (0..chart.dim())
            .map(|a| chart.name(a))
            .chain(chart.parameters().iter().map(|p| &**p))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(zt.seed);
        let rank = (0..zt.max_retries.max(1))
            .find_map(|_| linalg::numeric_rank(&wm, &sampling::random_point(&mut rng, &names)))
            .ok_or_else(|| Error::Inconclusive("rank of the bivector".into()))?;
        if rank != n {
            return Err(Error::RankDrop(format!("rank {rank} on leaves of dimension {n}")));
        }
        let winv = linalg::inverse(&wm)
            .ok_or_else(|| Error::RankDrop("singular leaf block".into()))?;
        let mut t = AltTable::zero(n, 2);
        for k in 0..n {
            for l in k + 1..n {
                t.set(&[k, l], -&winv[k][l]);
            }
        }
        LeafwiseSymplectic::new(LeafwiseForm::from_table(&chart, t)?, zt)
    }
}

/// Structural checks of a bivector: `[w, w] = 0`, tangency to the
/// foliation, and `ŵ ∘ Ω♯ = −Ω♯ ∘ d̃` on monomial functions and leafwise
/// one-forms of degree at most `max_degree`.
pub fn verify_poisson(w: &PoissonBivector, max_degree: usize, zt: &ZeroTest) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let ww = w.self_bracket();
    out.push(CheckResult::from_outcome(
        "schouten_square",
        ww.table()
            .first_nonzero(zt)
            .map(|r| r.map(|_| format!("[w,w] = {ww}"))),
        1,
    ));
    let sub = w.is_subordinate(zt);
    let subordinate = sub == Ok(true);
    out.push(CheckResult::from_outcome(
        "subordinate",
        sub.map(|ok| (!ok).then(|| format!("w = {} has transverse components", w.field()))),
        1,
    ));
    if !subordinate {
        out.push(CheckResult::skipped("intertwining", "bivector is not tangent to the foliation"));
        return out;
    }
    match w.to_symplectic(zt) {
        Ok(s) => {
            let (outcome, n) = intertwining(w, &s, max_degree, zt);
            out.push(CheckResult::from_outcome("intertwining", outcome, n));
        }
        Err(e) => out.push(CheckResult::skipped("intertwining", e.to_string())),
    }
    out
}

/// Checks `ŵ(Ω♯φ) + Ω♯(d̃φ) = 0` for monomial functions and monomial
/// multiples of `d̃z^i`; returns the first failing instance.
pub fn intertwining(
    w: &PoissonBivector,
    s: &LeafwiseSymplectic,
    max_degree: usize,
    zt: &ZeroTest,
) -> (Result<Option<String>>, usize) {
    let chart = s.chart().clone();
    let vars: Vec<&str> = (0..chart.dim()).map(|a| chart.name(a)).collect();
    let monos = sampling::monomials(&vars, max_degree);
    let mut count = 0;
    let mut run = || -> Result<Option<String>> {
        for m in &monos {
            let f = LeafwiseForm::function(&chart, m.clone());
            let lhs = w.contravariant_d(&s.sharp_form(&f)?);
            let rhs = s.sharp_form(&f.leafwise_d())?;
            count += 1;
            if !lhs.add(&rhs).is_zero(zt)? {
                return Ok(Some(format!("on the function {m}")));
            }
            for i in 0..chart.leaf_dim() {
                let alpha = LeafwiseForm::differential_of(&chart, chart.leaf_name(i))?
                    .scale(m);
                let lhs = w.contravariant_d(&s.sharp_form(&alpha)?);
                let rhs = s.sharp_form(&alpha.leafwise_d())?;
                count += 1;
                if !lhs.add(&rhs).is_zero(zt)? {
                    return Ok(Some(format!("on the one-form {alpha}")));
                }
            }
        }
        Ok(None)
    };
    let r = run();
    (r, count)
}
