//! Identity checks run against a loaded model.
//!
//! Checks are organised in groups; each group owns a random stream derived
//! from the run seed and the group name, so groups can run in any order or
//! in parallel without changing the outcome.

use std::collections::BTreeMap;
use std::fmt::Display;

use foliaquant_core::calculus::{schouten_bracket, LeafwiseForm, MultivectorField};
use foliaquant_core::manifold::{Chart, LeafSlice};
use foliaquant_core::poisson::{intertwining, verify_poisson, LeafwiseSymplectic, PoissonBivector};
use foliaquant_core::prequant::{lift_leafwise_connection, Connection, LeafwiseConnection};
use foliaquant_core::quantization::{FirstOrderOperator, Polarization, QuantumModel};
use foliaquant_core::report::{CheckResult, Status};
use foliaquant_core::sampling;
use foliaquant_core::{CExpr, Error, Expr, Result, ZeroTest};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Model, Structure};

/// Instance counts for the sampled identities.
pub const JACOBI_TRIPLES: usize = 100;
pub const FORMS_PER_DEGREE: usize = 100;
pub const FACTORIZATION_FORMS: usize = 50;
pub const MIN_SLICES: usize = 3;
pub const KERNEL_SAMPLES: usize = 50;
pub const PAIR_SAMPLES: usize = 50;
pub const LIFT_SAMPLES: usize = 50;
pub const UNITARY_SAMPLES: usize = 20;
pub const SCHOUTEN_SAMPLES: usize = 30;
pub const SECTIONS: usize = 20;
pub const MEMBERS: usize = 10;
pub const INVARIANCE_MEMBERS: usize = 5;
pub const LEAF_TRIPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    pub seed: u64,
    pub samples: usize,
    pub max_degree: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Group {
    Selftest,
    Structure,
    Calculus,
    Prequant,
    Polarization,
    Dirac,
    Leaf(usize),
}

impl Group {
    pub fn name(self) -> String {
        match self {
            Group::Selftest => "selftest".into(),
            Group::Structure => "structure".into(),
            Group::Calculus => "calculus".into(),
            Group::Prequant => "prequant".into(),
            Group::Polarization => "polarization".into(),
            Group::Dirac => "dirac".into(),
            Group::Leaf(k) => format!("leaves.{k}"),
        }
    }
}

/// A model together with everything derived from it once per run.
pub struct Context {
    pub model: Model,
    pub settings: Settings,
    pub zt: ZeroTest,
    pub symplectic: Result<LeafwiseSymplectic>,
    pub bivector: Option<PoissonBivector>,
    /// Declared leaves first, then random ones up to [`MIN_SLICES`].
    pub slices: Vec<LeafSlice>,
}

impl Context {
    pub fn new(model: Model, settings: Settings) -> Context {
        let zt = ZeroTest {
            samples: settings.samples,
            seed: settings.seed ^ 0x5eed_f011,
            ..ZeroTest::default()
        };
        let (symplectic, bivector) = match &model.structure {
            Structure::Omega(omega) => {
                let s = LeafwiseSymplectic::new(omega.clone(), &zt);
                let w = s.as_ref().ok().map(LeafwiseSymplectic::bivector);
                (s, w)
            }
            Structure::Bivector(field) => match PoissonBivector::new(field.clone()) {
                Ok(w) => (w.to_symplectic(&zt), Some(w)),
                Err(e) => (Err(e), None),
            },
        };
        let mut slices = model.leaves.clone();
        let mut rng = stream(settings.seed, "slices");
        while slices.len() < MIN_SLICES {
            slices.push(random_slice(&mut rng, &model.chart));
        }
        Context {
            model,
            settings,
            zt,
            symplectic,
            bivector,
            slices,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.model.chart
    }

    /// The structure not given in the model file, printed.
    pub fn derived(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        match (&self.model.structure, &self.symplectic) {
            (Structure::Omega(_), Ok(s)) => {
                out.insert("bivector".into(), s.bivector().field().to_string());
            }
            (Structure::Bivector(_), Ok(s)) => {
                out.insert("omega".into(), s.omega().to_string());
            }
            _ => {}
        }
        out
    }

    pub fn quantum(&self) -> std::result::Result<QuantumModel, String> {
        let symplectic = self.symplectic.clone().map_err(|e| format!("no leafwise symplectic structure: {e}"))?;
        let connection = self.model.connection.as_ref().ok_or("model has no connection")?;
        let pol = self.model.polarization.as_ref().ok_or("model has no polarization")?;
        let polarization = Polarization::new(self.chart(), pol.generators.clone())
            .map_err(|e| format!("invalid polarization: {e}"))?;
        Ok(QuantumModel {
            symplectic,
            connection: connection.leafwise.clone(),
            polarization,
            hamiltonians: pol.hamiltonians.clone(),
            epsilon: self.model.epsilon.clone(),
            reference_section: pol.reference_section.clone(),
            observables: self.model.observables.clone(),
            zero_test: self.zt,
        })
    }

    pub fn run(&self, group: Group) -> Vec<CheckResult> {
        let mut rng = stream(self.settings.seed, &group.name());
        match group {
            Group::Selftest => selftest(&self.zt),
            Group::Structure => structure(self, &mut rng),
            Group::Calculus => calculus(self, &mut rng),
            Group::Prequant => prequant(self, &mut rng),
            Group::Polarization => polarization(self),
            Group::Dirac => dirac(self, &mut rng),
            Group::Leaf(k) => leaf(self, k, &mut rng),
        }
    }
}

/// Independent random stream for a named group.
pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    rng.set_stream(h);
    rng
}

fn random_slice<R: Rng + ?Sized>(rng: &mut R, chart: &Chart) -> LeafSlice {
    let values = chart
        .transverse()
        .iter()
        .map(|t| {
            let (p, q) = sampling::rational_value(rng);
            (t.to_string(), Expr::rational(p, q))
        })
        .collect();
    LeafSlice::new(chart, values).expect("constant values")
}

/// Runs `f` on instances `0..n`, stopping at the first witness or error.
fn sampled(name: &str, n: usize, mut f: impl FnMut(usize) -> Result<Option<String>>) -> CheckResult {
    let mut done = 0;
    let mut outcome = Ok(None);
    for k in 0..n {
        done += 1;
        match f(k) {
            Ok(None) => {}
            other => {
                outcome = other;
                break;
            }
        }
    }
    CheckResult::from_outcome(name, outcome, done)
}

fn witness(zero: Result<bool>, show: impl FnOnce() -> String) -> Result<Option<String>> {
    Ok((!zero?).then(show))
}

fn differs<T: Display>(label: &str, a: &T, b: &T) -> String {
    format!("{label}: {a} != {b}")
}

fn names(chart: &Chart) -> Vec<&str> {
    (0..chart.dim()).map(|a| chart.name(a)).collect()
}

fn poly<R: Rng + ?Sized>(rng: &mut R, chart: &Chart, max_degree: usize) -> Expr {
    sampling::random_polynomial(rng, &names(chart), max_degree, 3)
}

fn transverse_poly<R: Rng + ?Sized>(rng: &mut R, chart: &Chart, max_degree: usize) -> Expr {
    let vars: Vec<&str> = chart.transverse().iter().map(|s| &**s).collect();
    sampling::random_polynomial(rng, &vars, max_degree, 3)
}

fn complex_poly<R: Rng + ?Sized>(rng: &mut R, chart: &Chart, max_degree: usize) -> CExpr {
    CExpr::new(poly(rng, chart, max_degree), poly(rng, chart, max_degree))
}

fn leaf_vector<R: Rng + ?Sized>(rng: &mut R, chart: &Chart, max_degree: usize) -> MultivectorField {
    let comps = (0..chart.leaf_dim()).map(|_| poly(rng, chart, max_degree)).collect();
    MultivectorField::leaf_vector(chart, comps).expect("leaf-sized")
}

fn prefixed(prefix: &str, results: Vec<CheckResult>) -> Vec<CheckResult> {
    results
        .into_iter()
        .map(|mut r| {
            r.name = format!("{prefix}.{}", r.name);
            r
        })
        .collect()
}

fn skip_all(names: &[&str], reason: &str) -> Vec<CheckResult> {
    names.iter().map(|n| CheckResult::skipped(*n, reason)).collect()
}

/// Guards the bracket sign: the intertwining relation and `{p, q}` on a
/// fixed non-constant structure.
fn selftest(zt: &ZeroTest) -> Vec<CheckResult> {
    let run = || -> Result<Option<String>> {
        let chart = Chart::new(&["s"], &["q", "p"])?;
        let omega = LeafwiseForm::from_components(&chart, 2, &[(vec!["p", "q"], chart.parse_real("1 + q^2")?)])?;
        let s = LeafwiseSymplectic::new(omega, zt)?;
        let w = s.bivector();
        let (outcome, _) = intertwining(&w, &s, 2, zt);
        if let Some(x) = outcome? {
            return Ok(Some(format!("intertwining fails {x}")));
        }
        let pq = s.bracket(&Expr::sym("p"), &Expr::sym("q"));
        let expected = chart.parse_real("1/(1 + q^2)")?;
        witness(zt.equal(&pq, &expected), || differs("{p, q}", &pq, &expected))
    };
    vec![CheckResult::from_outcome("selftest.schouten_convention", run(), 1)]
}

fn structure(ctx: &Context, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let zt = &ctx.zt;
    let chart = ctx.chart();
    let deg = ctx.settings.max_degree;
    let mut out = Vec::new();
    match &ctx.symplectic {
        Ok(s) => {
            let mut r = CheckResult::pass("structure.symplectic", 1);
            if let Some(w) = s.degeneracy_warning() {
                r = r.with_note(w);
            }
            out.push(r);
        }
        Err(e) => out.push(CheckResult::from_outcome("structure.symplectic", Err(e.clone()), 1)),
    }
    if let Some(w) = &ctx.bivector {
        out.extend(prefixed("structure", verify_poisson(w, deg, zt)));
    }
    let dependent = [
        "structure.antisymmetry",
        "structure.bracket_kernel",
        "structure.bracket_reconstruction",
        "structure.jacobi",
        "structure.leibniz",
        "structure.round_trip",
        "structure.sharp_flat",
    ];
    let s = match &ctx.symplectic {
        Ok(s) => s,
        Err(_) => {
            out.extend(skip_all(&dependent, "no leafwise symplectic structure"));
            return out;
        }
    };

    let round_trip = || -> Result<Option<String>> {
        let w = s.bivector();
        let back = w.to_symplectic(zt)?;
        match &ctx.model.structure {
            Structure::Omega(omega) => witness(back.omega().sub(omega).is_zero(zt), || {
                differs("Omega -> w -> Omega", back.omega(), omega)
            }),
            Structure::Bivector(field) => witness(w.field().sub(field).is_zero(zt), || {
                differs("w -> Omega -> w", w.field(), field)
            }),
        }
    };
    out.push(CheckResult::from_outcome("structure.round_trip", round_trip(), 1));

    out.push(sampled("structure.jacobi", JACOBI_TRIPLES, |_| {
        let (f, g, h) = (poly(rng, chart, deg), poly(rng, chart, deg), poly(rng, chart, deg));
        let b = |x: &Expr, y: &Expr| s.bracket(x, y);
        let j = &(&b(&f, &b(&g, &h)) + &b(&g, &b(&h, &f))) + &b(&h, &b(&f, &g));
        witness(zt.is_zero(&j), || format!("f = {f}, g = {g}, h = {h}"))
    }));
    out.push(sampled("structure.antisymmetry", PAIR_SAMPLES, |_| {
        let (f, g) = (poly(rng, chart, deg), poly(rng, chart, deg));
        let r = &s.bracket(&f, &g) + &s.bracket(&g, &f);
        witness(zt.is_zero(&r), || format!("f = {f}, g = {g}"))
    }));
    out.push(sampled("structure.leibniz", PAIR_SAMPLES, |_| {
        let (f, g, h) = (poly(rng, chart, deg), poly(rng, chart, deg), poly(rng, chart, deg));
        let lhs = s.bracket(&f, &(&g * &h));
        let rhs = &(&s.bracket(&f, &g) * &h) + &(&g * &s.bracket(&f, &h));
        witness(zt.equal(&lhs, &rhs), || format!("f = {f}, g = {g}, h = {h}"))
    }));
    out.push(sampled("structure.bracket_kernel", KERNEL_SAMPLES, |_| {
        let c = transverse_poly(rng, chart, deg);
        let f = poly(rng, chart, deg);
        let r = s.bracket(&c, &f);
        witness(zt.is_zero(&r), || format!("{{{c}, {f}}} = {r}"))
    }));
    let w = s.bivector();
    out.push(sampled("structure.bracket_reconstruction", PAIR_SAMPLES, |_| {
        let (f, g) = (poly(rng, chart, deg), poly(rng, chart, deg));
        let from_fields = s.evaluate(&s.hamiltonian_field(&f), &s.hamiltonian_field(&g))?;
        let from_symplectic = s.bracket(&f, &g);
        let from_bivector = w.bracket(&f, &g);
        if !zt.equal(&from_fields, &from_symplectic)? {
            return Ok(Some(differs("Omega(theta_f, theta_g) vs {f,g}", &from_fields, &from_symplectic)));
        }
        witness(zt.equal(&from_bivector, &from_symplectic), || {
            differs("w(df, dg) vs {f,g}", &from_bivector, &from_symplectic)
        })
    }));
    out.push(sampled("structure.sharp_flat", PAIR_SAMPLES, |_| {
        let v = leaf_vector(rng, chart, deg);
        let back = s.sharp(&s.flat(&v)?)?;
        witness(back.sub(&v).is_zero(zt), || differs("sharp(flat(v))", &back, &v))
    }));
    out
}

fn calculus(ctx: &Context, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let zt = &ctx.zt;
    let chart = ctx.chart();
    let deg = ctx.settings.max_degree.min(2);
    let mut out = Vec::new();

    let degrees = chart.dim() + 1;
    out.push(sampled("calculus.d_squared", FORMS_PER_DEGREE * degrees, |k| {
        let a = sampling::random_exterior_form(rng, chart, k % degrees, deg);
        let dd = a.exterior_d().exterior_d();
        witness(dd.is_zero(zt), || format!("d(d({a})) = {dd}"))
    }));
    let leaf_degrees = chart.leaf_dim() + 1;
    out.push(sampled("calculus.leafwise_d_squared", FORMS_PER_DEGREE * leaf_degrees, |k| {
        let a = sampling::random_leafwise_form(rng, chart, k % leaf_degrees, deg);
        let dd = a.leafwise_d().leafwise_d();
        witness(dd.is_zero(zt), || format!("d~(d~({a})) = {dd}"))
    }));
    out.push(sampled("calculus.cochain", FORMS_PER_DEGREE * degrees, |k| {
        let a = sampling::random_exterior_form(rng, chart, k % degrees, deg);
        let lhs = a.exterior_d().project_leafwise();
        let rhs = a.project_leafwise().leafwise_d();
        witness(lhs.sub(&rhs).is_zero(zt), || format!("on {a}: {lhs} != {rhs}"))
    }));

    let slices = &ctx.slices;
    out.push(
        sampled("calculus.leaf_factorization", FACTORIZATION_FORMS, |k| {
            let r = k % leaf_degrees;
            let a = sampling::random_exterior_form(rng, chart, r, deg);
            let b = sampling::random_leafwise_form(rng, chart, r, deg);
            for sl in slices {
                let direct = a.pullback_to_leaf(sl)?;
                let projected = a.project_leafwise().pullback_to_leaf(sl)?;
                if !direct.sub(&projected).is_zero(zt)? {
                    return Ok(Some(format!("on {sl}: pullback of {a} does not factor")));
                }
                let lhs = b.leafwise_d().pullback_to_leaf(sl)?;
                let rhs = b.pullback_to_leaf(sl)?.exterior_d();
                if !lhs.sub(&rhs).is_zero(zt)? {
                    return Ok(Some(format!("on {sl}: d~ of {b} does not restrict to d")));
                }
            }
            Ok(None)
        })
        .with_note(format!("{} forms of each kind on {} leaves", FACTORIZATION_FORMS, slices.len())),
    );

    let mv = |rng: &mut ChaCha8Rng, d: usize| sampling::random_multivector(rng, chart, d, deg);
    out.push(sampled("calculus.schouten_antisymmetry", SCHOUTEN_SAMPLES, |_| {
        let (p, q) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let (a, b) = (mv(rng, p), mv(rng, q));
        let ab = schouten_bracket(&a, &b);
        let ba = schouten_bracket(&b, &a);
        let ba = if (p * q) % 2 == 1 { ba.neg() } else { ba };
        witness(ab.sub(&ba).is_zero(zt), || format!("P = {a}, Q = {b}"))
    }));
    out.push(sampled("calculus.schouten_jacobi", SCHOUTEN_SAMPLES, |_| {
        let (p, q, r) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(0..=2));
        let (a, b, c) = (mv(rng, p), mv(rng, q), mv(rng, r));
        let lhs = schouten_bracket(&a, &schouten_bracket(&b, &c));
        let t1 = schouten_bracket(&schouten_bracket(&a, &b), &c);
        let t2 = schouten_bracket(&b, &schouten_bracket(&a, &c));
        let t1 = if (p + 1) % 2 == 0 { t1 } else { t1.neg() };
        let t2 = if ((p as i64 - 1) * (q as i64 - 1)).rem_euclid(2) == 1 { t2.neg() } else { t2 };
        witness(lhs.sub(&t1.add(&t2)).is_zero(zt), || format!("P = {a}, Q = {b}, R = {c}"))
    }));
    match (&ctx.bivector, &ctx.symplectic) {
        (Some(w), Ok(_)) => out.push(sampled("calculus.contravariant_square", SCHOUTEN_SAMPLES, |k| {
            let theta = mv(rng, k % 3);
            let r = w.contravariant_d(&w.contravariant_d(&theta));
            witness(r.is_zero(zt), || format!("w^(w^({theta})) = {r}"))
        })),
        _ => out.push(CheckResult::skipped("calculus.contravariant_square", "no Poisson bivector")),
    }
    out
}

/// The connection used for transverse checks: the model's full connection,
/// or the lift of its leafwise part over the trivial connection.
fn full_connection(ctx: &Context) -> Option<Result<Connection>> {
    let c = ctx.model.connection.as_ref()?;
    Some(match &c.full {
        Some(g) => Ok(g.clone()),
        None => lift_leafwise_connection(&c.leafwise, &Connection::zero(ctx.chart()), &c.splitting)
            .map(|g| g.in_hermitian_gauge(c.hermitian_gauge)),
    })
}

fn prequant(ctx: &Context, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let names = [
        "prequant.chern_form",
        "prequant.condition",
        "prequant.curvature_projection",
        "prequant.endomorphism",
        "prequant.gauge_invariance",
        "prequant.leaf_curvature",
        "prequant.leibniz",
        "prequant.lift",
        "prequant.lift_round_trip",
        "prequant.unitary_chain",
    ];
    let Some(conn) = &ctx.model.connection else {
        return skip_all(&names, "model has no connection");
    };
    let s = match &ctx.symplectic {
        Ok(s) => s,
        Err(_) => return skip_all(&names, "no leafwise symplectic structure"),
    };
    let zt = &ctx.zt;
    let chart = ctx.chart();
    let deg = ctx.settings.max_degree.min(2);
    let eps = &ctx.model.epsilon;
    let a = &conn.leafwise;
    let mut out = Vec::new();

    let defect = a.prequantization_defect(s.omega(), eps);
    out.push(CheckResult::from_outcome(
        "prequant.condition",
        witness(defect.is_zero(zt), || format!("R~ - i*eps*Omega = {defect}")),
        1,
    ));

    let full = full_connection(ctx).expect("connection present");
    let outcome = full.clone().and_then(|g| {
        let proj = g.curvature().project_leafwise();
        let leafwise = g.restrict().curvature();
        let restricts = g.restrict() == *a;
        if !restricts {
            return Ok(Some("connection does not restrict to its leafwise part".into()));
        }
        witness(proj.sub(&leafwise).is_zero(zt), || differs("projected curvature", &proj, &leafwise))
    });
    out.push(CheckResult::from_outcome("prequant.curvature_projection", outcome, 1));

    let outcome = full.clone().and_then(|g| {
        let lifted = lift_leafwise_connection(a, &g, &conn.splitting)?;
        if lifted.restrict() != *a {
            return Ok(Some("lift does not restrict to A".into()));
        }
        let proj = lifted.curvature().project_leafwise();
        witness(proj.sub(&a.curvature()).is_zero(zt), || differs("lifted curvature", &proj, &a.curvature()))
    });
    out.push(CheckResult::from_outcome("prequant.lift", outcome, 1));

    out.push(sampled("prequant.lift_round_trip", LIFT_SAMPLES, |_| {
        let pots = (0..chart.leaf_dim()).map(|_| complex_poly(rng, chart, deg)).collect();
        let b = LeafwiseConnection::new(chart, pots)?;
        let reference = Connection::new(
            chart,
            (0..chart.codim()).map(|_| complex_poly(rng, chart, deg)).collect(),
            (0..chart.leaf_dim()).map(|_| complex_poly(rng, chart, deg)).collect(),
        )?;
        let lifted = lift_leafwise_connection(&b, &reference, &conn.splitting)?;
        if lifted.restrict() != b {
            return Ok(Some("lift does not restrict".into()));
        }
        let proj = lifted.curvature().project_leafwise();
        witness(proj.sub(&b.curvature()).is_zero(zt), || differs("lifted curvature", &proj, &b.curvature()))
    }));

    out.push(sampled("prequant.gauge_invariance", UNITARY_SAMPLES, |_| {
        let chi = complex_poly(rng, chart, deg);
        let shifted = a.gauge_shift(&chi);
        let r = shifted.curvature().sub(&a.curvature());
        witness(r.is_zero(zt), || format!("gauge {chi} changes curvature by {r}"))
    }));

    out.push(sampled("prequant.leibniz", UNITARY_SAMPLES, |_| {
        let v = leaf_vector(rng, chart, deg);
        let f = poly(rng, chart, deg);
        let sec = complex_poly(rng, chart, deg);
        let lhs = a.covariant_derivative(&v, &(&CExpr::real(f.clone()) * &sec))?;
        let rhs = &sec.scale(&v.apply(&f)) + &a.covariant_derivative(&v, &sec)?.scale(&f);
        witness(zt.is_zero_complex(&(&lhs - &rhs)), || format!("v = {v}, f = {f}, s = {sec}"))
    }));

    let curvature = a.curvature();
    out.push(sampled("prequant.endomorphism", UNITARY_SAMPLES, |_| {
        let (u, v) = (leaf_vector(rng, chart, deg), leaf_vector(rng, chart, deg));
        let sec = complex_poly(rng, chart, deg);
        let lhs = a.curvature_endomorphism(&u, &v, &sec)?;
        let rhs = &curvature.evaluate(&[&u, &v])? * &sec;
        witness(zt.is_zero_complex(&(&lhs - &rhs)), || differs("R(u,v)s", &lhs, &rhs))
    }));

    let slices = &ctx.slices;
    out.push(
        sampled("prequant.leaf_curvature", slices.len(), |k| {
            let sl = &slices[k];
            let omega = s.omega().restrict_to_leaf(sl)?;
            let b = a.restrict_to_leaf(sl)?;
            let d = b.prequantization_defect(&omega, eps);
            witness(d.is_zero(zt), || format!("on {sl}: {d}"))
        }),
    );

    let unitary_names = ["prequant.chern_form", "prequant.unitary_chain"];
    let base = match &full {
        Ok(g) if g.is_unitary() => g.clone().in_hermitian_gauge(true),
        Ok(_) => {
            out.extend(skip_all(&unitary_names, "connection potentials are not imaginary"));
            return out;
        }
        Err(e) => {
            out.extend(skip_all(&unitary_names, &e.to_string()));
            return out;
        }
    };
    let outcome = base.chern_form().and_then(|c1| {
        let factor = eps
            .checked_div(&(&Expr::int(2) * &Expr::pi()))
            .ok_or(Error::DivisionByZero)?;
        let r = c1.project_leafwise().add(&s.omega().scale(&factor));
        witness(r.is_zero(zt), || format!("c1 + eps/(2 pi) Omega = {r}"))
    });
    out.push(CheckResult::from_outcome("prequant.chern_form", outcome, 1));

    out.push(sampled("prequant.unitary_chain", UNITARY_SAMPLES, |_| {
        let chi = poly(rng, chart, deg);
        let shift = |a: usize, re: Expr| CExpr::new(re, chart.diff(&chi, chart.name(a)).expect("chart coordinate"));
        let pots: Vec<CExpr> = base
            .potentials()
            .iter()
            .enumerate()
            .map(|(k, p)| p + &shift(k, poly(rng, chart, deg)))
            .collect();
        let codim = chart.codim();
        let gamma = Connection::new(chart, pots[..codim].to_vec(), pots[codim..].to_vec())?
            .in_hermitian_gauge(true);
        let reduced = gamma.unitary_reduction()?;
        if !reduced.is_unitary() {
            return Ok(Some("reduction is not unitary".into()));
        }
        let rg = reduced.curvature();
        let im_part = gamma.curvature().map(|c| CExpr::imag(c.im.clone()));
        if !rg.sub(&im_part).is_zero(zt)? {
            return Ok(Some(differs("R^g vs i Im R", &rg, &im_part)));
        }
        if !rg.sub(&base.curvature()).is_zero(zt)? {
            return Ok(Some(differs("R^g vs base curvature", &rg, &base.curvature())));
        }
        let c1 = reduced.chern_form()?;
        let c0 = base.chern_form()?;
        witness(c1.sub(&c0).is_zero(zt), || differs("Chern forms", &c1, &c0))
    }));
    out
}

fn polarization(ctx: &Context) -> Vec<CheckResult> {
    let names = [
        "polarization.hamiltonians",
        "polarization.involutive",
        "polarization.isotropic",
        "polarization.rank",
        "polarization.reference_section",
        "polarization.subordinate",
    ];
    let Some(pol) = &ctx.model.polarization else {
        return skip_all(&names, "model has no polarization");
    };
    let zt = &ctx.zt;
    let chart = ctx.chart();
    let mut out = Vec::new();
    let p = match Polarization::new(chart, pol.generators.clone()) {
        Ok(p) => p,
        Err(e) => {
            out.push(CheckResult::from_outcome("polarization.subordinate", Err(e), pol.generators.len()));
            return out;
        }
    };
    out.push(CheckResult::pass("polarization.subordinate", pol.generators.len()));
    let s = match &ctx.symplectic {
        Ok(s) => s,
        Err(_) => {
            out.extend(skip_all(&names[..5], "no leafwise symplectic structure"));
            return out;
        }
    };
    let report = match p.verify(s, zt) {
        Ok(r) => r,
        Err(e) => {
            out.push(CheckResult::from_outcome("polarization.rank", Err(e), 1));
            return out;
        }
    };
    let n = pol.generators.len();
    out.push(CheckResult::from_outcome("polarization.involutive", report.involutive.clone(), n * n.saturating_sub(1) / 2));
    out.push(CheckResult::from_outcome("polarization.isotropic", report.isotropic.clone(), n * n.saturating_sub(1) / 2));
    out.push(CheckResult::pass("polarization.rank", 1).with_note(format!(
        "rank {} in leaf dimension {}{}",
        report.rank,
        chart.leaf_dim(),
        if report.lagrangian { ", Lagrangian" } else { ", not Lagrangian" }
    )));

    match &pol.hamiltonians {
        None => out.push(CheckResult::skipped("polarization.hamiltonians", "no hamiltonians_of given")),
        Some(hs) => {
            let run = || -> Result<Option<String>> {
                for h in hs {
                    let theta = s.hamiltonian_field(h);
                    if !p.contains(&theta, &report.basis, zt)? {
                        return Ok(Some(format!("theta_{h} = {theta} is not in T")));
                    }
                }
                let fields = Polarization::new(chart, hs.iter().map(|h| s.hamiltonian_field(h)).collect())?;
                let rank = fields.basis(zt)?.len();
                Ok((rank != report.rank).then(|| format!("Hamiltonian fields span rank {rank}, T has rank {}", report.rank)))
            };
            out.push(CheckResult::from_outcome("polarization.hamiltonians", run(), hs.len()));
        }
    }

    match ctx.quantum() {
        Ok(qm) => {
            let rho = &pol.reference_section;
            out.push(CheckResult::from_outcome(
                "polarization.reference_section",
                witness(qm.is_polarized(rho), || format!("{rho} is not polarized")),
                1,
            ));
            for (name, f) in &ctx.model.observables {
                out.push(CheckResult::from_outcome(
                    format!("polarization.algebra.{name}"),
                    witness(qm.in_quantum_algebra(f), || format!("[theta_f, T] is not in T for f = {f}")),
                    1,
                ));
            }
        }
        Err(reason) => out.push(CheckResult::skipped("polarization.reference_section", reason)),
    }
    out
}

/// Observables of the model that belong to its quantum algebra.
fn algebra_members(qm: &QuantumModel) -> Vec<Expr> {
    qm.observables
        .iter()
        .filter(|(_, f)| qm.in_quantum_algebra(f) == Ok(true))
        .map(|(_, f)| f.clone())
        .collect()
}

fn operator_witness(op: &FirstOrderOperator, zt: &ZeroTest) -> Result<Option<String>> {
    Ok(op.first_nonzero(zt)?.map(|(label, c)| format!("{label} coefficient {c}")))
}

fn dirac(ctx: &Context, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let qm = match ctx.quantum() {
        Ok(q) => q,
        Err(reason) => {
            return skip_all(
                &[
                    "dirac.kernel",
                    "dirac.linearity",
                    "dirac.membership",
                    "dirac.pairs",
                    "dirac.sample",
                    "dirac.sample_invariance",
                    "dirac.self_adjoint",
                ],
                &reason,
            )
        }
    };
    let zt = &ctx.zt;
    let chart = ctx.chart();
    let deg = ctx.settings.max_degree.min(2);
    let mut out = Vec::new();

    let obs = &ctx.model.observables;
    let pairs: Vec<(usize, usize)> = (0..obs.len()).flat_map(|a| (a..obs.len()).map(move |b| (a, b))).collect();
    let mut pairs_result = sampled("dirac.pairs", pairs.len(), |k| {
        let ((nf, f), (ng, g)) = (&obs[pairs[k].0], &obs[pairs[k].1]);
        let d = qm.dirac_defect(f, g);
        Ok(operator_witness(&d, zt)?.map(|w| format!("[{nf}^, {ng}^] + i {{{nf}, {ng}}}^ has {w}")))
    });
    let outside: Vec<&str> = obs
        .iter()
        .filter(|(_, f)| qm.in_quantum_algebra(f) != Ok(true))
        .map(|(n, _)| n.as_str())
        .collect();
    if !outside.is_empty() {
        pairs_result = pairs_result.with_note(format!("outside the quantum algebra: {}", outside.join(", ")));
    }
    out.push(pairs_result);

    let generators = algebra_members(&qm);
    let members: Vec<Expr> = (0..MEMBERS).map(|_| qm.random_member(rng, &generators, deg)).collect();
    out.push(sampled("dirac.membership", members.len(), |k| {
        let f = &members[k];
        witness(qm.in_quantum_algebra(f), || format!("sampled {f} is not in the algebra"))
    }));
    let mut divergent = 0;
    for f in &members {
        if zt.is_zero(&qm.hamiltonian_field(f).divergence()) == Ok(false) {
            divergent += 1;
        }
    }
    let sample_pairs: Vec<(usize, usize)> =
        (0..members.len()).flat_map(|a| (a..members.len()).map(move |b| (a, b))).collect();
    out.push(
        sampled("dirac.sample", sample_pairs.len(), |k| {
            let (f, g) = (&members[sample_pairs[k].0], &members[sample_pairs[k].1]);
            Ok(operator_witness(&qm.dirac_defect(f, g), zt)?.map(|w| format!("f = {f}, g = {g}: {w}")))
        })
        .with_note(format!(
            "{} members, {divergent} with divergent Hamiltonian field",
            members.len()
        )),
    );

    let sections: Vec<CExpr> = (0..SECTIONS).map(|_| qm.random_polarized_section(rng, deg)).collect();
    for (name, f) in obs {
        out.push(sampled(&format!("dirac.invariance.{name}"), sections.len(), |k| {
            let rho = &sections[k];
            witness(qm.preserves_polarized(f, rho), || format!("{name}^ does not preserve polarized {rho}"))
        }));
    }
    let inv_members = &members[..INVARIANCE_MEMBERS.min(members.len())];
    out.push(sampled(
        "dirac.sample_invariance",
        inv_members.len() * sections.len(),
        |k| {
            let f = &inv_members[k / sections.len()];
            let rho = &sections[k % sections.len()];
            if !qm.is_polarized(rho)? {
                return Ok(Some(format!("sampled section {rho} is not polarized")));
            }
            witness(qm.preserves_polarized(f, rho), || format!("f = {f}, rho = {rho}"))
        },
    ));

    out.push(sampled("dirac.kernel", KERNEL_SAMPLES.min(20), |_| {
        let c = transverse_poly(rng, chart, deg);
        let expected = FirstOrderOperator::multiplication(chart, CExpr::real(&qm.epsilon * &c));
        operator_witness(&qm.ks_operator(&c).sub(&expected), zt)
    }));
    out.push(sampled("dirac.linearity", UNITARY_SAMPLES, |_| {
        let (f, g) = (poly(rng, chart, deg), poly(rng, chart, deg));
        let k = Expr::int(sampling::nonzero_int(rng, 5));
        let lhs = qm.ks_operator(&(&f + &(&k * &g)));
        let rhs = qm.ks_operator(&f).add(&qm.ks_operator(&g).scale(&CExpr::real(k)));
        operator_witness(&lhs.sub(&rhs), zt)
    }));
    if qm.connection.is_unitary() {
        out.push(sampled("dirac.self_adjoint", members.len(), |k| {
            let op = qm.ks_operator(&members[k]);
            operator_witness(&op.sub(&op.formal_adjoint()), zt)
        }));
    } else {
        out.push(CheckResult::skipped("dirac.self_adjoint", "connection potentials are not imaginary"));
    }
    out
}

fn leaf(ctx: &Context, k: usize, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let zt = &ctx.zt;
    let chart = ctx.chart();
    let deg = ctx.settings.max_degree.min(2);
    let slice = &ctx.slices[k];
    let name = |n: &str| format!("leaves.{k}.{n}");
    let mut out = Vec::new();
    let declared = k < ctx.model.leaves.len();
    let origin = if declared { "declared" } else { "random" };

    let s = match &ctx.symplectic {
        Ok(s) => s,
        Err(_) => return vec![CheckResult::skipped(name("symplectic"), "no leafwise symplectic structure")],
    };
    let leaf_s = s
        .omega()
        .restrict_to_leaf(slice)
        .and_then(|o| LeafwiseSymplectic::new(o, zt));
    let leaf_s = match leaf_s {
        Ok(l) => {
            out.push(CheckResult::pass(name("symplectic"), 1).with_note(format!("{origin} leaf {slice}")));
            l
        }
        Err(e) => {
            out.push(CheckResult::from_outcome(name("symplectic"), Err(e), 1).with_note(format!("{origin} leaf {slice}")));
            return out;
        }
    };
    out.push(sampled(&name("bracket"), PAIR_SAMPLES.min(20), |_| {
        let (f, g) = (poly(rng, chart, deg), poly(rng, chart, deg));
        let lhs = slice.restrict(&s.bracket(&f, &g))?;
        let rhs = leaf_s.bracket(&slice.restrict(&f)?, &slice.restrict(&g)?);
        witness(zt.equal(&lhs, &rhs), || format!("f = {f}, g = {g}"))
    }));

    let qm = match ctx.quantum() {
        Ok(q) => q,
        Err(reason) => {
            for n in ["algebra", "commutation", "polarization", "polarized_restriction", "prequant"] {
                out.push(CheckResult::skipped(name(n), reason.clone()));
            }
            return out;
        }
    };
    let lq = match qm.restrict_to_leaf(slice) {
        Ok(l) => l,
        Err(e) => {
            out.push(CheckResult::from_outcome(name("restriction"), Err(e), 1));
            return out;
        }
    };
    let d = lq.connection.prequantization_defect(lq.symplectic.omega(), &lq.epsilon);
    out.push(CheckResult::from_outcome(
        name("prequant"),
        witness(d.is_zero(zt), || format!("R~ - i*eps*Omega = {d}")),
        1,
    ));
    let outcome = lq.polarization.verify(&lq.symplectic, zt).and_then(|r| {
        if let Some(w) = r.involutive? {
            return Ok(Some(format!("not involutive: {w}")));
        }
        if let Some(w) = r.isotropic? {
            return Ok(Some(format!("not isotropic: {w}")));
        }
        let full = qm.polarization.basis(zt)?.len();
        Ok((r.rank != full).then(|| format!("rank drops from {full} to {}", r.rank)))
    });
    out.push(CheckResult::from_outcome(name("polarization"), outcome, 1));

    let generators = algebra_members(&qm);
    out.push(sampled(&name("algebra"), generators.len(), |j| {
        let f = slice.restrict(&generators[j])?;
        witness(lq.in_quantum_algebra(&f), || format!("restriction {f} leaves the algebra"))
    }));
    out.push(sampled(&name("commutation"), LEAF_TRIPLES, |_| {
        let f = qm.random_member(rng, &generators, deg);
        let rho = qm.random_polarized_section(rng, deg);
        let d = qm.leaf_commutation_defect(&lq, &f, &rho, slice)?;
        witness(zt.is_zero_complex(&d), || format!("f = {f}, rho = {rho}: {d}"))
    }));
    out.push(sampled(&name("polarized_restriction"), SECTIONS, |_| {
        let rho = qm.random_polarized_section(rng, deg);
        let r = slice.restrict(&rho)?;
        witness(lq.is_polarized(&r), || format!("{r} is not polarized on the leaf"))
    }));
    out
}

pub fn exit_code(results: &[CheckResult]) -> i32 {
    if results.iter().any(|r| r.status == Status::Fail) {
        1
    } else if results.iter().any(|r| r.status == Status::Inconclusive) {
        2
    } else {
        0
    }
}
