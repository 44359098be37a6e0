//! Sparse multivariate polynomials over the rationals.
//!
//! Variables are [`Atom`]s: named symbols, the constant `pi`, and the
//! transcendental atoms `sin(u)`, `cos(u)`, `exp(u)` whose arguments are
//! themselves canonical rational expressions. Two rewrites keep products of
//! transcendental atoms in normal form:
//!
//! * all `exp` factors of a monomial merge into a single `exp(sum)`,
//! * `cos(u)^2` is rewritten as `1 - sin(u)^2`.
//!
//! The gcd and exact-division routines are only meaningful on the pure
//! polynomial part (symbols and `pi`); callers check [`Poly::is_pure`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::expr::Expr;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Pi,
    Sym(Arc<str>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Exp(Arc<Expr>),
}

impl Atom {
    pub fn is_transcendental(&self) -> bool {
        matches!(self, Atom::Sin(_) | Atom::Cos(_) | Atom::Exp(_))
    }
}

/// A power product of atoms, sorted by atom, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    fn without(&self, a: &Atom) -> Monomial {
        Monomial(self.0.iter().filter(|(b, _)| b != a).cloned().collect())
    }

    pub(crate) fn with_power(&self, a: &Atom, e: u32) -> Monomial {
        let mut v: Vec<(Atom, u32)> = self.0.iter().filter(|(b, _)| b != a).cloned().collect();
        if e > 0 {
            let pos = v.partition_point(|(b, _)| b < a);
            v.insert(pos, (a.clone(), e));
        }
        Monomial(v)
    }

    /// Product of two monomials with `exp` factors merged.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = &self.0[i];
            let (b, eb) = &other.0[j];
            match a.cmp(b) {
                std::cmp::Ordering::Less => {
                    out.push((a.clone(), *ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b.clone(), *eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.clone(), ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        merge_exponentials(out)
    }

    pub fn is_pure(&self) -> bool {
        self.0.iter().all(|(a, _)| !a.is_transcendental())
    }
}

fn merge_exponentials(v: Vec<(Atom, u32)>) -> Monomial {
    let exp_count: u32 = v
        .iter()
        .filter(|(a, _)| matches!(a, Atom::Exp(_)))
        .map(|(_, e)| *e)
        .sum();
    if exp_count <= 1 {
        return Monomial(v);
    }
    let mut arg = Expr::zero();
    let mut rest = Vec::with_capacity(v.len());
    for (a, e) in v {
        match a {
            Atom::Exp(u) => arg = &arg + &(&*u * &Expr::int(e as i64)),
            other => rest.push((other, e)),
        }
    }
    if !arg.is_zero_structural() {
        let a = Atom::Exp(Arc::new(arg));
        let pos = rest.partition_point(|(b, _)| b < &a);
        rest.insert(pos, (a, 1));
    }
    Monomial(rest)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn atom(a: Atom) -> Self {
        Poly::monomial(Monomial::atom(a), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p.reduce_trig()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// No transcendental atoms at the top level.
    pub fn is_pure(&self) -> bool {
        self.terms.keys().all(Monomial::is_pure)
    }

    pub fn has_transcendental(&self) -> bool {
        !self.is_pure()
    }

    /// Coefficient of the greatest monomial in the internal order.
    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.terms.values().next_back()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(a, _)| a.clone()))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out.reduce_trig()
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Rewrites every `cos(u)^k`, `k >= 2`, through `cos^2 = 1 - sin^2`.
    fn reduce_trig(self) -> Poly {
        let needs = self.terms.keys().any(|m| {
            m.0.iter().any(|(a, e)| matches!(a, Atom::Cos(_)) && *e >= 2)
        });
        if !needs {
            return self;
        }
        let mut out = Poly::zero();
        let mut work: Vec<(Monomial, BigRational)> = self.terms.into_iter().collect();
        while let Some((m, c)) = work.pop() {
            let cos = m
                .0
                .iter()
                .find(|(a, e)| matches!(a, Atom::Cos(_)) && *e >= 2)
                .cloned();
            match cos {
                None => out.add_term(m, c),
                Some((cos_atom, e)) => {
                    let arg = match &cos_atom {
                        Atom::Cos(u) => u.clone(),
                        _ => unreachable!(),
                    };
                    let sin_atom = Atom::Sin(arg);
                    let base = m.with_power(&cos_atom, e - 2);
                    let s = base.exponent(&sin_atom);
                    work.push((base.clone(), c.clone()));
                    work.push((base.with_power(&sin_atom, s + 2), -c));
                }
            }
        }
        out
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(a)).max().unwrap_or(0)
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.terms.keys().any(|m| m.exponent(a) > 0)
    }

    fn max_atom(&self) -> Option<Atom> {
        self.terms
            .keys()
            .filter_map(|m| m.0.last().map(|(a, _)| a.clone()))
            .max()
    }

    /// Coefficients with respect to `a`, keyed by the power of `a`.
    pub fn split(&self, a: &Atom) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(a);
            out.entry(e).or_default().add_term(m.without(a), c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    fn lead_in(&self, a: &Atom) -> (u32, Poly) {
        let s = self.split(a);
        s.into_iter().next_back().unwrap_or((0, Poly::zero()))
    }

    fn times_atom_power(&self, a: &Atom, e: u32) -> Poly {
        if e == 0 {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let k = m.exponent(a);
            out.add_term(m.with_power(a, k + e), c.clone());
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    /// Only valid for pure polynomials.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let x = d.max_atom()?;
        let (db, lb) = d.lead_in(&x);
        let mut r = self.clone();
        let mut q = Poly::zero();
        loop {
            if r.is_zero() {
                return Some(q);
            }
            let (dr, lr) = r.lead_in(&x);
            if dr < db {
                return None;
            }
            let c = lr.exact_div(&lb)?;
            let t = c.times_atom_power(&x, dr - db);
            r = r.sub(&t.mul(d));
            q = q.add(&t);
        }
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading_coefficient() {
            Some(c) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    fn content_in(&self, x: &Atom) -> Poly {
        let mut g = Poly::zero();
        for c in self.split(x).into_values() {
            g = Poly::gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// `gcd(g, content_in(x))` for `g` free of `x`, folding `g` in first
    /// so the scan stops as soon as the running gcd is trivial.
    fn gcd_with_coefficients(&self, g: &Poly, x: &Atom) -> Poly {
        let mut acc = g.monic();
        for c in self.split(x).into_values() {
            acc = Poly::gcd(&acc, &c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    /// Coefficients with respect to the atoms outside `keep`.
    fn coefficients_over(&self, keep: &BTreeSet<Atom>) -> Vec<Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inner, outer): (Vec<_>, Vec<_>) = m.0.iter().cloned().partition(|(a, _)| keep.contains(a));
            out.entry(Monomial(outer)).or_default().add_term(Monomial(inner), c.clone());
        }
        out.into_values().filter(|p| !p.is_zero()).collect()
    }

    /// gcd of `a` and `b` when it is known to lie in the ring generated by `support`.
    fn gcd_over(a: &Poly, b: &Poly, support: &BTreeSet<Atom>) -> Poly {
        let mut cs = a.coefficients_over(support);
        cs.extend(b.coefficients_over(support));
        cs.sort_by_key(|p| p.len());
        let mut acc = Poly::zero();
        for c in cs {
            acc = Poly::gcd(&acc, &c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    fn primitive_in(&self, x: &Atom) -> Poly {
        let c = self.content_in(x);
        self.exact_div(&c).expect("content divides")
    }

    fn pseudo_remainder(f: &Poly, g: &Poly, x: &Atom) -> Poly {
        let (dg, lg) = g.lead_in(x);
        let mut r = f.clone();
        loop {
            if r.is_zero() {
                return r;
            }
            let (dr, lr) = r.lead_in(x);
            if dr < dg {
                return r;
            }
            r = lg.mul(&r).sub(&lr.times_atom_power(x, dr - dg).mul(g));
        }
    }

    /// Monic greatest common divisor of two pure polynomials.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.as_constant().is_some() || b.as_constant().is_some() {
            return Poly::one();
        }
        if a == b {
            return a.monic();
        }
        let x = match (a.max_atom(), b.max_atom()) {
            (Some(p), Some(q)) => p.max(q),
            _ => return Poly::one(),
        };
        let support = super::modp::gcd_support(a, b);
        if support.is_empty() {
            return Poly::one();
        }
        if support.len() < a.atoms().union(&b.atoms()).count() {
            return Poly::gcd_over(a, b, &support);
        }
        if !a.contains(&x) {
            return b.gcd_with_coefficients(a, &x);
        }
        if !b.contains(&x) {
            return a.gcd_with_coefficients(b, &x);
        }
        let ca = a.content_in(&x);
        let cb = b.content_in(&x);
        let content = Poly::gcd(&ca, &cb);
        let pa = a.exact_div(&ca).expect("content divides");
        let pb = b.exact_div(&cb).expect("content divides");
        let (mut f, mut g) = if pa.degree_in(&x) >= pb.degree_in(&x) {
            (pa, pb)
        } else {
            (pb, pa)
        };
        let g = loop {
            let r = Poly::pseudo_remainder(&f, &g, &x);
            if r.is_zero() {
                break g;
            }
            if r.degree_in(&x) == 0 {
                break Poly::one();
            }
            f = g;
            g = r.primitive_in(&x);
        };
        content.mul(&g.primitive_in(&x)).monic()
    }

    pub fn map_coefficients_to_f64(&self) -> Vec<(f64, &Monomial)> {
        self.terms
            .iter()
            .map(|(m, c)| (rational_to_f64(c), m))
            .collect()
    }
}

pub(crate) fn rational_to_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

fn fmt_rational(c: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pi => write!(f, "pi"),
            Atom::Sym(s) => write!(f, "{s}"),
            Atom::Sin(u) => write!(f, "sin({u})"),
            Atom::Cos(u) => write!(f, "cos({u})"),
            Atom::Exp(u) => write!(f, "exp({u})"),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (a, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                fmt_rational(&mag, f)?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                fmt_rational(&mag, f)?;
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Poly {
        Poly::atom(Atom::Sym(Arc::from(s)))
    }

    fn c(n: i64) -> Poly {
        Poly::constant(rat(n))
    }

    #[test]
    fn gcd_of_shared_factor() {
        let q = sym("q");
        let p = sym("p");
        let f = q.mul(&q).add(&c(1)); // 1 + q^2
        let a = f.mul(&p.add(&c(2)));
        let b = f.mul(&q.sub(&p));
        assert_eq!(Poly::gcd(&a, &b), f.monic());
    }

    #[test]
    fn gcd_coprime_is_one() {
        let q = sym("q");
        let p = sym("p");
        assert!(Poly::gcd(&q.add(&c(1)), &p.add(&c(1))).is_one());
        assert!(Poly::gcd(&q.mul(&q), &q.add(&c(1))).is_one());
    }

    #[test]
    fn gcd_multivariate_power() {
        let q = sym("q");
        let s = sym("s");
        let f = q.mul(&s).add(&c(1));
        let a = f.pow(3).mul(&q);
        let b = f.pow(2).mul(&s.add(&c(3)));
        assert_eq!(Poly::gcd(&a, &b), f.pow(2).monic());
    }

    #[test]
    fn exact_division() {
        let q = sym("q");
        let p = sym("p");
        let a = q.add(&p).mul(&q.sub(&p));
        assert_eq!(a.exact_div(&q.add(&p)), Some(q.sub(&p)));
        assert_eq!(a.exact_div(&q.add(&c(1))), None);
    }

    #[test]
    fn trig_rewrite_applies() {
        let u = Arc::new(Expr::sym("q"));
        let s = Poly::atom(Atom::Sin(u.clone()));
        let co = Poly::atom(Atom::Cos(u));
        let id = s.mul(&s).add(&co.mul(&co)).sub(&c(1));
        assert!(id.is_zero());
    }
}
