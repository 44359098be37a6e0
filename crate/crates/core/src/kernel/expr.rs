//! Real symbolic scalars: canonical rational functions over [`Atom`]s.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::poly::{rat, rational_to_f64, Atom, Monomial, Poly};

/// Simultaneous substitution map, keyed by symbol name.
pub type Bindings = BTreeMap<Arc<str>, Expr>;

/// Numeric assignment of symbols used by the evaluation fallback.
pub type Point = BTreeMap<Arc<str>, f64>;

/// A real expression `num / den`.
///
/// Invariants: `den` is nonzero with leading coefficient one; `num == 0`
/// implies `den == 1`; when both parts are free of transcendental atoms they
/// are coprime. Under these rules the representation of a rational function
/// is unique, so structural equality decides equality for that class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::from_rational(rat(n))
    }

    pub fn rational(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Expr::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn sym(name: &str) -> Self {
        Expr::from_poly(Poly::atom(Atom::Sym(Arc::from(name))))
    }

    pub fn pi() -> Self {
        Expr::from_poly(Poly::atom(Atom::Pi))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// `num / den` brought to canonical form; `None` if `den` is zero.
    pub fn from_parts(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(Expr::normalize(num, den))
        }
    }

    fn normalize(mut num: Poly, mut den: Poly) -> Self {
        if num.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = den.as_constant() {
            return Expr {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        if num.is_pure() && den.is_pure() {
            let g = Poly::gcd(&num, &den);
            if !g.is_one() {
                num = num.exact_div(&g).expect("gcd divides numerator");
                den = den.exact_div(&g).expect("gcd divides denominator");
            }
        }
        let lc = den.leading_coefficient().cloned().expect("nonzero");
        if !lc.is_one() {
            let k = lc.recip();
            num = num.scale(&k);
            den = den.scale(&k);
        }
        Expr { num, den }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero_structural(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|c| c.is_one())
    }

    /// Free of transcendental atoms in numerator and denominator.
    pub fn is_rational_function(&self) -> bool {
        self.num.is_pure() && self.den.is_pure()
    }

    /// Leading numerator coefficient is negative.
    pub fn has_negative_lead(&self) -> bool {
        self.num.leading_coefficient().is_some_and(|c| c.is_negative())
    }

    pub fn sin(&self) -> Expr {
        if self.is_zero_structural() {
            return Expr::zero();
        }
        if self.has_negative_lead() {
            return -(-self).sin();
        }
        Expr::from_poly(Poly::atom(Atom::Sin(Arc::new(self.clone()))))
    }

    pub fn cos(&self) -> Expr {
        if self.is_zero_structural() {
            return Expr::one();
        }
        if self.has_negative_lead() {
            return (-self).cos();
        }
        Expr::from_poly(Poly::atom(Atom::Cos(Arc::new(self.clone()))))
    }

    pub fn exp(&self) -> Expr {
        if self.is_zero_structural() {
            return Expr::one();
        }
        Expr::from_poly(Poly::atom(Atom::Exp(Arc::new(self.clone()))))
    }

    pub fn recip(&self) -> Option<Expr> {
        if self.is_zero_structural() {
            return None;
        }
        Some(Expr::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Expr) -> Option<Expr> {
        other.recip().map(|r| self * &r)
    }

    /// Integer power; `None` for a negative power of zero.
    pub fn powi(&self, e: i32) -> Option<Expr> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Some(Expr {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    pub fn scale(&self, k: &BigRational) -> Expr {
        Expr::normalize(self.num.scale(k), self.den.clone())
    }

    /// Partial derivative with respect to the symbol `x`.
    pub fn diff(&self, x: &str) -> Expr {
        if !self.depends_on(x) {
            return Expr::zero();
        }
        let dn = diff_poly(&self.num, x);
        if self.den.is_one() {
            return dn;
        }
        let dd = diff_poly(&self.den, x);
        let den = Expr::from_poly(self.den.clone());
        let num = Expr::from_poly(self.num.clone());
        let top = &(&dn * &den) - &(&num * &dd);
        let den_sq = Expr::from_poly(self.den.mul(&self.den));
        top.checked_div(&den_sq).expect("denominator is nonzero")
    }

    /// Simultaneous substitution of symbols.
    pub fn substitute(&self, bindings: &Bindings) -> Expr {
        if bindings.is_empty() || !bindings.keys().any(|k| self.depends_on(k)) {
            return self.clone();
        }
        let n = subst_poly(&self.num, bindings);
        if self.den.is_one() {
            return n;
        }
        let d = subst_poly(&self.den, bindings);
        n.checked_div(&d)
            .expect("substitution produced a vanishing denominator")
    }

    /// Substitution that reports a vanishing denominator instead of panicking.
    pub fn try_substitute(&self, bindings: &Bindings) -> Option<Expr> {
        if bindings.is_empty() || !bindings.keys().any(|k| self.depends_on(k)) {
            return Some(self.clone());
        }
        let n = subst_poly(&self.num, bindings);
        let d = subst_poly(&self.den, bindings);
        n.checked_div(&d)
    }

    pub fn symbols(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        collect_symbols(&self.num, &mut out);
        collect_symbols(&self.den, &mut out);
        out
    }

    pub fn depends_on(&self, x: &str) -> bool {
        poly_depends_on(&self.num, x) || poly_depends_on(&self.den, x)
    }

    /// Floating-point value at `point`; `None` on a missing symbol, a pole or
    /// a non-finite intermediate.
    pub fn eval_f64(&self, point: &Point) -> Option<f64> {
        let n = eval_poly(&self.num, point)?;
        let d = eval_poly(&self.den, point)?;
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let v = n / d;
        v.is_finite().then_some(v)
    }

    /// Value of the numerator at `point` together with the sum of the
    /// magnitudes of its terms, used as the scale of a zero test.
    pub(crate) fn eval_numerator_with_scale(&self, point: &Point) -> Option<(f64, f64)> {
        let mut value = 0.0;
        let mut scale = 0.0;
        for (m, c) in self.num.terms() {
            let t = rational_to_f64(c) * eval_monomial(m, point)?;
            value += t;
            scale += t.abs();
        }
        let d = eval_poly(&self.den, point)?;
        if d == 0.0 || !d.is_finite() || !value.is_finite() || !scale.is_finite() {
            return None;
        }
        Some((value, scale))
    }
}

fn atom_depends_on(a: &Atom, x: &str) -> bool {
    match a {
        Atom::Pi => false,
        Atom::Sym(s) => &**s == x,
        Atom::Sin(u) | Atom::Cos(u) | Atom::Exp(u) => u.depends_on(x),
    }
}

fn poly_depends_on(p: &Poly, x: &str) -> bool {
    p.terms()
        .any(|(m, _)| m.factors().iter().any(|(a, _)| atom_depends_on(a, x)))
}

fn collect_symbols(p: &Poly, out: &mut BTreeSet<Arc<str>>) {
    for (m, _) in p.terms() {
        for (a, _) in m.factors() {
            match a {
                Atom::Pi => {}
                Atom::Sym(s) => {
                    out.insert(s.clone());
                }
                Atom::Sin(u) | Atom::Cos(u) | Atom::Exp(u) => out.extend(u.symbols()),
            }
        }
    }
}

fn atom_derivative(a: &Atom, x: &str) -> Expr {
    match a {
        Atom::Pi => Expr::zero(),
        Atom::Sym(s) => {
            if &**s == x {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Sin(u) => {
            let du = u.diff(x);
            if du.is_zero_structural() {
                return du;
            }
            &u.cos() * &du
        }
        Atom::Cos(u) => {
            let du = u.diff(x);
            if du.is_zero_structural() {
                return du;
            }
            -(&u.sin() * &du)
        }
        Atom::Exp(u) => {
            let du = u.diff(x);
            if du.is_zero_structural() {
                return du;
            }
            &u.exp() * &du
        }
    }
}

fn diff_poly(p: &Poly, x: &str) -> Expr {
    if p.is_pure() {
        let xa = Atom::Sym(Arc::from(x));
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let e = m.exponent(&xa);
            if e > 0 {
                let t = Poly::monomial(m.with_power(&xa, e - 1), c * rat(e as i64));
                out = out.add(&t);
            }
        }
        return Expr::from_poly(out);
    }
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        for (a, e) in m.factors() {
            if !atom_depends_on(a, x) {
                continue;
            }
            let rest = Poly::monomial(m.with_power(a, e - 1), c * rat(*e as i64));
            acc = &acc + &(&Expr::from_poly(rest) * &atom_derivative(a, x));
        }
    }
    acc
}

fn subst_atom(a: &Atom, b: &Bindings) -> Expr {
    match a {
        Atom::Pi => Expr::pi(),
        Atom::Sym(s) => b
            .get(s)
            .cloned()
            .unwrap_or_else(|| Expr::from_poly(Poly::atom(a.clone()))),
        Atom::Sin(u) => u.substitute(b).sin(),
        Atom::Cos(u) => u.substitute(b).cos(),
        Atom::Exp(u) => u.substitute(b).exp(),
    }
}

fn subst_poly(p: &Poly, b: &Bindings) -> Expr {
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut t = Expr::from_rational(c.clone());
        for (a, e) in m.factors() {
            let v = subst_atom(a, b);
            t = &t * &v.powi(*e as i32).expect("positive power");
        }
        acc = &acc + &t;
    }
    acc
}

fn eval_atom(a: &Atom, point: &Point) -> Option<f64> {
    match a {
        Atom::Pi => Some(std::f64::consts::PI),
        Atom::Sym(s) => point.get(s).copied(),
        Atom::Sin(u) => u.eval_f64(point).map(f64::sin),
        Atom::Cos(u) => u.eval_f64(point).map(f64::cos),
        Atom::Exp(u) => u.eval_f64(point).map(f64::exp),
    }
}

fn eval_monomial(m: &Monomial, point: &Point) -> Option<f64> {
    let mut v = 1.0;
    for (a, e) in m.factors() {
        v *= eval_atom(a, point)?.powi(*e as i32);
    }
    v.is_finite().then_some(v)
}

fn eval_poly(p: &Poly, point: &Point) -> Option<f64> {
    let mut v = 0.0;
    for (m, c) in p.terms() {
        v += rational_to_f64(c) * eval_monomial(m, point)?;
    }
    v.is_finite().then_some(v)
}

fn add_impl(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero_structural() {
        return b.clone();
    }
    if b.is_zero_structural() {
        return a.clone();
    }
    if a.den == b.den {
        return Expr::normalize(a.num.add(&b.num), a.den.clone());
    }
    if a.den.is_pure() && b.den.is_pure() {
        let g = Poly::gcd(&a.den, &b.den);
        let ad = a.den.exact_div(&g).expect("gcd divides");
        let bd = b.den.exact_div(&g).expect("gcd divides");
        let num = a.num.mul(&bd).add(&b.num.mul(&ad));
        return Expr::normalize(num, a.den.mul(&bd));
    }
    let num = a.num.mul(&b.den).add(&b.num.mul(&a.den));
    Expr::normalize(num, a.den.mul(&b.den))
}

fn mul_impl(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero_structural() || b.is_zero_structural() {
        return Expr::zero();
    }
    if a.den.is_one() && b.den.is_one() {
        return Expr::from_poly(a.num.mul(&b.num));
    }
    Expr::normalize(a.num.mul(&b.num), a.den.mul(&b.den))
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        add_impl(self, rhs)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        add_impl(self, &-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        mul_impl(self, rhs)
    }
}

/// Panics on a structurally zero divisor; use [`Expr::checked_div`] otherwise.
impl Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! owned_binops {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { $tr::$m(&self, &rhs) }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { $tr::$m(&self, rhs) }
        }
    )*};
}
pub(crate) use owned_binops;

owned_binops!(Expr, Add add, Sub sub, Mul mul, Div div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

fn needs_parens_as_factor(p: &Poly) -> bool {
    if p.len() > 1 {
        return true;
    }
    match p.terms().next() {
        None => false,
        Some((m, c)) => c.is_negative() || (!c.is_one() && !m.is_one()) || m.factors().len() > 1,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        let single_atom = self.den.len() == 1
            && self
                .den
                .terms()
                .next()
                .is_some_and(|(m, c)| c.is_one() && m.factors().len() == 1);
        if single_atom && !needs_parens_as_factor(&self.den) {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}
